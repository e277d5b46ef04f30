#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "trisphere/kinematics.hpp"

namespace trisphere {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Force-free solution for the three aligned spheres at one instant.
struct MobilitySolution {
  std::array<double, 3> force{};     // axial hydrodynamic forces on spheres
  std::array<double, 3> velocity{};  // axial sphere velocities
  double vcm = 0.0;                  // dX/dt
};

/// Solves the Oseen-level mobility problem
///   V_i = F_i / (6 pi mu R) + sum_{j != i} F_j / (4 pi mu |X_i - X_j|)
/// closed by sum F_i = 0 and the imposed relative velocities
/// V2 - V1 = dL1/dt, V3 - V2 = dL2/dt.
MobilitySolution solve_mobility(const std::array<double, 3>& positions,
                                const std::array<double, 2>& arm_rates,
                                const SwimmerGeometry& g);

struct ActionResult {
  Posture end;
  double dX = 0.0;
  /// Mobility solutions at the midpoints of the substeps.
  std::vector<MobilitySolution> trajectory;
};

/// Integrates dX/dt over one action with the midpoint rule. The final arm
/// lengths are those of transition(s, a) exactly.
ActionResult integrate_action(const Posture& posture, AgentState s, Action a,
                              const SwimmerGeometry& g, int n_substeps = 200);

/// Net displacement of a sequence of actions starting at state s0.
double sequence_displacement(AgentState s0, const std::vector<Action>& actions,
                             const SwimmerGeometry& g, int n_substeps = 200);

/// Displacement over one right-swimming gait (actions 1-2-1-2 from state 4).
double gait_displacement(const SwimmerGeometry& g, int n_substeps = 200);

/// Center-of-mass velocity with all arm motion at rate S.
/// Convenience for the average swimming speed V = S * dX / (4 w).
double gait_mean_velocity(const SwimmerGeometry& g, int n_substeps = 200);

/// Ambient Stokes flow reconstructed by superposing, for every sphere, the
/// exact exterior solution of an isolated translating sphere (Stokeslet plus
/// source doublet) whose strength follows the sphere's hydrodynamic force.
struct FlowModel {
  struct Sphere {
    double center = 0.0;
    double radius = 1.0;
    double rigid_velocity = 0.0;     // velocity of the sphere itself
    double effective_velocity = 0.0; // F / (6 pi mu R)
  };
  std::vector<Sphere> spheres;
  /// Velocity of the reference frame; subtracted from every query.
  double frame_velocity = 0.0;

  static FlowModel from_solution(const std::array<double, 3>& positions,
                                 const MobilitySolution& sol,
                                 const SwimmerGeometry& g);
  /// Single sphere moving at speed U, observed in its own frame.
  static FlowModel towed_sphere(double radius, double U);
  /// No spheres, fluid at rest.
  static FlowModel quiescent() { return {}; }
};

struct AxialVelocity {
  double ux = 0.0;
  double urho = 0.0;
};

/// Velocity at (x, rho) in the axisymmetric meridian plane. Points inside a
/// sphere get that sphere's rigid velocity.
AxialVelocity flow_velocity(const FlowModel& model, double x, double rho);

}  // namespace trisphere
