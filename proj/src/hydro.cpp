#include "trisphere/hydro.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace trisphere {

MobilitySolution solve_mobility(const std::array<double, 3>& positions,
                                const std::array<double, 2>& arm_rates,
                                const SwimmerGeometry& g) {
  for (int i = 0; i < 2; ++i) {
    const double gap = positions[i + 1] - positions[i];
    if (gap == 0.0) {
      throw SingularSystemError("solve_mobility: coincident sphere centers");
    }
    if (!(gap > 2.0 * g.R)) {
      throw PreconditionError(
          "solve_mobility: spheres overlap or are out of order");
    }
  }

  const double pi = std::numbers::pi;
  const double self = 1.0 / (6.0 * pi * g.mu * g.R);

  // Rigid offsets of each sphere velocity relative to dX/dt.
  const double r1 = arm_rates[0];
  const double r2 = arm_rates[1];
  const std::array<double, 3> offset = {-2.0 / 3.0 * r1 - r2 / 3.0,
                                        r1 / 3.0 - r2 / 3.0,
                                        r1 / 3.0 + 2.0 / 3.0 * r2};

  // Unknowns (F1, F2, F3, Vcm).
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      A(i, j) = (i == j)
                    ? self
                    : 1.0 / (4.0 * pi * g.mu *
                             std::abs(positions[i] - positions[j]));
    }
    A(i, 3) = -1.0;
    b(i) = offset[i];
  }
  A(3, 0) = A(3, 1) = A(3, 2) = 1.0;

  const Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
  if (!lu.isInvertible()) {
    throw SingularSystemError("solve_mobility: singular mobility system");
  }
  Eigen::Vector4d x = lu.solve(b);
  // One refinement sweep keeps the force-free residual at roundoff level.
  x += lu.solve(b - A * x);

  MobilitySolution sol;
  sol.vcm = x(3);
  for (int i = 0; i < 3; ++i) {
    sol.force[i] = x(i);
    sol.velocity[i] = sol.vcm + offset[i];
  }
  return sol;
}

ActionResult integrate_action(const Posture& posture, AgentState s, Action a,
                              const SwimmerGeometry& g, int n_substeps) {
  if (n_substeps < 1) {
    throw PreconditionError("integrate_action: n_substeps must be >= 1");
  }
  if (!posture_matches(posture, s, g)) {
    throw PreconditionError("integrate_action: posture inconsistent with state");
  }
  const Posture target = posture_for(transition(s, a), g, 0.0);
  const auto rates = arm_rates(s, a, g);
  const double dt = g.action_duration() / n_substeps;

  ActionResult res;
  res.trajectory.reserve(static_cast<std::size_t>(n_substeps));
  double X = posture.X;
  for (int k = 0; k < n_substeps; ++k) {
    // Arm lengths move linearly, so the midpoint posture is exact.
    const double f = (k + 0.5) / n_substeps;
    const double L1 = posture.L1 + f * (target.L1 - posture.L1);
    const double L2 = posture.L2 + f * (target.L2 - posture.L2);
    const auto pos = sphere_positions(X, L1, L2);
    MobilitySolution sol = solve_mobility(pos, rates, g);
    X += dt * sol.vcm;
    res.trajectory.push_back(sol);
  }
  res.dX = X - posture.X;
  res.end = Posture{X, target.L1, target.L2};
  return res;
}

double sequence_displacement(AgentState s0, const std::vector<Action>& actions,
                             const SwimmerGeometry& g, int n_substeps) {
  Posture p = posture_for(s0, g, 0.0);
  AgentState s = s0;
  for (Action a : actions) {
    p = integrate_action(p, s, a, g, n_substeps).end;
    s = transition(s, a);
  }
  return p.X;
}

double gait_displacement(const SwimmerGeometry& g, int n_substeps) {
  using enum Action;
  return sequence_displacement(AgentState::from_label(4),
                               {move_arm1, move_arm2, move_arm1, move_arm2}, g,
                               n_substeps);
}

double gait_mean_velocity(const SwimmerGeometry& g, int n_substeps) {
  return g.S * gait_displacement(g, n_substeps) / (4.0 * g.w);
}

FlowModel FlowModel::from_solution(const std::array<double, 3>& positions,
                                   const MobilitySolution& sol,
                                   const SwimmerGeometry& g) {
  FlowModel m;
  const double drag = 6.0 * std::numbers::pi * g.mu * g.R;
  for (int i = 0; i < 3; ++i) {
    m.spheres.push_back(
        {positions[i], g.R, sol.velocity[i], sol.force[i] / drag});
  }
  return m;
}

FlowModel FlowModel::towed_sphere(double radius, double U) {
  FlowModel m;
  m.spheres.push_back({0.0, radius, U, U});
  m.frame_velocity = U;
  return m;
}

AxialVelocity flow_velocity(const FlowModel& model, double x, double rho) {
  AxialVelocity u;
  for (const auto& sp : model.spheres) {
    const double dx = x - sp.center;
    const double r2 = dx * dx + rho * rho;
    const double a = sp.radius;
    if (r2 < a * a) {
      return {sp.rigid_velocity - model.frame_velocity, 0.0};
    }
    const double U = sp.effective_velocity;
    const double r = std::sqrt(r2);
    const double inv_r = 1.0 / r;
    const double inv_r3 = inv_r * inv_r * inv_r;
    const double inv_r5 = inv_r3 * inv_r * inv_r;
    const double a3 = a * a * a;
    // u = (3a/4)[U/r + (U.x)x/r^3] + (a^3/4)[U/r^3 - 3(U.x)x/r^5]
    u.ux += U * (0.75 * a * (inv_r + dx * dx * inv_r3) +
                 0.25 * a3 * (inv_r3 - 3.0 * dx * dx * inv_r5));
    u.urho += U * dx * rho * (0.75 * a * inv_r3 - 0.75 * a3 * inv_r5);
  }
  u.ux -= model.frame_velocity;
  return u;
}

}  // namespace trisphere
