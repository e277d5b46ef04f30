#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "trisphere/grid.hpp"
#include "trisphere/hydro.hpp"
#include "trisphere/kinematics.hpp"

namespace trisphere {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sherwood number of a towed sphere, Sh = (1 + (1 + 2 Pe)^(1/3)) / 2.
double clift_sherwood(double Pe);

/// Outer boundary treatment.
///  - dirichlet: C = c_inf + g x on the window boundary.
///  - monopole:  the disturbance C - (c_inf + g x) decays like 1/r about the
///    swimmer's center, imposed as a Robin condition. Removes the leading
///    finite-window error of steady diffusive fluxes.
enum class FarField : std::uint8_t { dirichlet, monopole };

struct TransportConfig {
  double D = 1.0;       // solute diffusivity
  double c_inf = 1.0;   // far-field concentration offset
  double g = 0.0;       // background axial gradient
  GridSpec grid;
  /// Penalization coefficient; <= 0 selects default_lambda().
  double lambda = 0.0;
  /// Largest transport step; <= 0 means 0.1 w/S.
  double dt_max = 0.0;
  /// Courant number for the explicit advection substeps.
  double cfl = 0.5;
  /// Largest sphere travel per transport step, in core cells.
  double mask_cfl = 1.0;
  /// Lower clamp on fluid-to-surface link distances, as a fraction of the
  /// center-to-center distance.
  double min_link_fraction = 0.1;
  FarField far_field = FarField::dirichlet;

  static TransportConfig from_peclet(const SwimmerGeometry& g, double Pe);
  double peclet(const SwimmerGeometry& geo) const { return geo.S * geo.R / D; }
  void validate() const;
};

/// max(1e4 S/R, 1e7 D/h^2): keeps in-solid values below 1e-6 of the
/// neighboring fluid value at every Peclet number.
double default_lambda(const SwimmerGeometry& g, double D, double h);

struct SphereBody {
  double center = 0.0;  // lab frame
  double radius = 1.0;
};

std::vector<SphereBody> swimmer_bodies(const Posture& p,
                                       const SwimmerGeometry& g);

/// Concentration on the axisymmetric window, anchored at lab position x0.
struct ConcentrationField {
  std::shared_ptr<const AxisymmetricGrid> grid;
  double x0 = 0.0;
  std::vector<double> c;
  std::vector<std::uint8_t> solid;

  double at(std::size_t i, std::size_t j) const { return c[grid->index(i, j)]; }
  double x_lab(std::size_t i) const { return x0 + grid->x_centers()[i]; }
};

/// Penalized advection-diffusion solver owning one concentration field.
///
/// A step is: explicit limited second-order upwind advection substeps
/// (SSP-RK2, advective form) with the supplied flow, followed by one
/// backward-Euler solve of diffusion plus penalization -lambda*mask*C with the
/// sphere geometry currently set. Fluid-solid links use the distance from
/// the fluid cell center to the sphere surface.
class TransportSolver {
 public:
  TransportSolver(const SwimmerGeometry& geo, TransportConfig cfg);

  const TransportConfig& config() const { return cfg_; }
  const AxisymmetricGrid& grid() const { return *grid_; }
  const ConcentrationField& field() const { return field_; }
  double lambda() const { return lambda_; }

  /// Places the window so that lab position x_center sits at the window
  /// origin, aligned to whole core cells.
  void set_window_center(double x_center);
  /// Replaces all values by the background c_inf + g x (solids excluded).
  void fill_background();
  void set_values(std::vector<double> c);

  /// Sets the absorbing spheres used by the next implicit solve.
  void set_spheres(std::vector<SphereBody> spheres);
  const std::vector<SphereBody>& spheres() const { return spheres_; }

  /// Steady penalized diffusion (no advection) for the current spheres.
  void solve_steady();

  /// One transport step of length dt. `flow` is sampled for the advection
  /// substeps; the implicit part uses the spheres set beforehand.
  void advance(const FlowModel& flow, double dt);

  /// Advection alone, split into CFL-stable substeps. Returns the count.
  int advect(const FlowModel& flow, double dt);
  /// Implicit diffusion and penalization alone.
  void diffuse(double dt);

  /// Absorbed flux sum_solid lambda C V.
  double flux() const;
  /// sum V C over the window.
  double total_mass() const;
  double background(double x_lab) const { return cfg_.c_inf + cfg_.g * x_lab; }

  /// Shifts the window by whole core cells so that x_lab is as close as
  /// possible to the window origin. Values are remapped conservatively;
  /// cells entering the window receive the background. Returns the shift in
  /// cells.
  long recenter(double x_lab);

  /// Largest |u_x|/dx + |u_rho|/drho over the grid, for a flow.
  double max_courant_rate(const FlowModel& flow) const;

 private:
  void rebuild_mask();
  void assemble(double inv_dt);
  void factorize_and_solve(const Eigen::VectorXd& rhs);
  void advection_rate(const std::vector<double>& c, std::vector<double>& out);
  double ghost_value(std::size_t i, std::size_t j, int side) const;
  void check_finite(const char* where) const;

  SwimmerGeometry geo_;
  TransportConfig cfg_;
  std::shared_ptr<const AxisymmetricGrid> grid_;
  double lambda_ = 0.0;
  long window_shift_ = 0;
  double window_base_ = 0.0;

  ConcentrationField field_;
  std::vector<SphereBody> spheres_;

  // Link graph of the 5-point stencil (a < b) and the static conductances.
  std::vector<std::uint32_t> link_a_, link_b_;
  std::vector<double> link_base_;
  std::vector<double> link_dist_;
  std::vector<double> link_g_;
  std::vector<std::uint8_t> link_axis_;  // 0 = x link, 1 = rho link
  // Boundary faces.
  struct BoundaryFace {
    std::uint32_t cell;
    double area;
    double half_width;
    double x;     // window coordinate of the face center
    double rho;
    double nx;    // outward normal
    double nrho;
  };
  std::vector<BoundaryFace> bnd_;

  std::vector<double> volume_;
  std::vector<std::uint32_t> modified_links_;

  Eigen::SparseMatrix<double> matrix_;
  std::vector<Eigen::Index> diag_pos_, link_pos_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;

  // Advection scratch.
  std::vector<double> ux_, ur_, rate_, stage_, slope_x_, slope_r_;
};

/// Steady diffusive flux of the posture in a homogeneous background.
double steady_diffusive_flux(const Posture& posture, const SwimmerGeometry& g,
                             const TransportConfig& cfg);

/// Absorbed flux of a field given the spheres that define the solid mask.
double instantaneous_flux(const TransportSolver& solver);

}  // namespace trisphere
