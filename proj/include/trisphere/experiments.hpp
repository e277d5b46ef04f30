#pragma once

#include <cstdint>
#include <vector>

#include "trisphere/coupled.hpp"
#include "trisphere/rl.hpp"
#include "trisphere/transport.hpp"

namespace trisphere {

// ---------------------------------------------------------------------------
// Towed sphere

struct TowedResult {
  double pe = 0.0;
  double J0 = 0.0;      // steady diffusive flux
  double J = 0.0;       // flux at the end of the run
  double sherwood = 0.0;
  double t_end = 0.0;
  bool converged = false;
};

/// A sphere of radius R held at the window origin in a uniform stream of
/// speed U = S (frame of the sphere), D = U R / Pe (D = R S when Pe == 0,
/// with no stream). Marches from the steady diffusive field until
/// |dJ/dt| < steady_tol * J or t_max. The grid core is shrunk to
/// |x| <= core_half_x around the sphere; the far field is the monopole
/// condition. At Pe == 0 the reported Sherwood number is J0 / (4 pi R D).
TowedResult towed_sphere_sherwood(const SwimmerGeometry& geo, double pe,
                                  GridSpec grid, double core_half_x = 3.0,
                                  double t_max = 150.0, double steady_tol = 1e-6);

// ---------------------------------------------------------------------------
// Steady diffusive fluxes

/// Window sized for arm length W: core |x| <= W + 3R, outer extents scaled
/// by the same factor as the core.
GridSpec grid_for_arm_length(GridSpec base, const SwimmerGeometry& geo);

/// Steady flux of the fully extended swimmer (state 4) with C = 1 far away,
/// monopole far field.
double baseline_flux(const SwimmerGeometry& geo, const GridSpec& grid);

/// Steady flux of a single sphere with C = 1 far away, monopole far field.
double single_sphere_flux(const SwimmerGeometry& geo, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Gait runs

struct GaitRun {
  double pe = 0.0;
  double J0 = 0.0;
  PeriodAverage average;
  std::vector<FluxRecord> records;
  double sherwood() const { return average.mean / J0; }
};

/// Steady start in state 4, then the swimming gait for ceil(horizon / (w/S))
/// actions with C = 1 far away. J0 is the steady flux of the immobile
/// extended posture on the same grid.
GaitRun run_gait(const SwimmerGeometry& geo, double pe,
                 const TransportConfig& base, double horizon,
                 CoupledOptions opt = {});

// ---------------------------------------------------------------------------
// Experience generation

/// Random-policy rollout of the coupled simulation in the background
/// C = g x, starting from the steady field of the immobile posture s0 at
/// X = 0.
std::vector<Experience> generate_experiences(const SwimmerGeometry& geo,
                                             double pe, double gradient,
                                             const TransportConfig& base,
                                             std::size_t n_actions,
                                             AgentState s0, std::uint64_t seed,
                                             CoupledOptions opt = {});

}  // namespace trisphere
