#include "trisphere/kinematics.hpp"

#include <cmath>
#include <string>

namespace trisphere {

void SwimmerGeometry::validate() const {
  if (!(std::isfinite(R) && std::isfinite(W) && std::isfinite(w) &&
        std::isfinite(S) && std::isfinite(mu))) {
    throw PreconditionError("geometry: non-finite parameter");
  }
  if (!(R > 0.0)) throw PreconditionError("geometry: R must be positive");
  if (!(S > 0.0)) throw PreconditionError("geometry: S must be positive");
  if (!(mu > 0.0)) throw PreconditionError("geometry: mu must be positive");
  if (!(w > 0.0 && w < W)) {
    throw PreconditionError("geometry: stroke must satisfy 0 < w < W");
  }
  if (!(W - w > 2.0 * R)) {
    throw PreconditionError(
        "geometry: contracted arm W - w must exceed 2R (spheres overlap)");
  }
}

int action_label(Action a) { return static_cast<int>(a); }

Action action_from_label(int label) {
  if (label == 1) return Action::move_arm1;
  if (label == 2) return Action::move_arm2;
  throw PreconditionError("invalid action label " + std::to_string(label));
}

AgentState AgentState::from_label(int label) {
  if (label < 1 || label > 4) {
    throw PreconditionError("invalid state label " + std::to_string(label));
  }
  const int bits = label - 1;
  return AgentState(static_cast<Arm>((bits >> 1) & 1),
                    static_cast<Arm>(bits & 1));
}

std::array<double, 3> sphere_positions(double X, double L1, double L2) {
  if (!(std::isfinite(X) && std::isfinite(L1) && std::isfinite(L2))) {
    throw PreconditionError("sphere_positions: non-finite input");
  }
  // Anchor on the middle sphere so that X2 - X1 == L1 and X3 - X2 == L2
  // hold exactly in floating point.
  const double x2 = X + L1 / 3.0 - L2 / 3.0;
  return {x2 - L1, x2, x2 + L2};
}

static Arm toggled(Arm a) {
  return a == Arm::contracted ? Arm::extended : Arm::contracted;
}

AgentState transition(AgentState s, Action a) {
  if (a == Action::move_arm1) return AgentState(toggled(s.arm1()), s.arm2());
  return AgentState(s.arm1(), toggled(s.arm2()));
}

Action gait_action(AgentState s) {
  const int l = s.label();
  return (l == 1 || l == 4) ? Action::move_arm1 : Action::move_arm2;
}

static double arm_length(Arm a, const SwimmerGeometry& g) {
  return a == Arm::extended ? g.extended_length() : g.contracted_length();
}

Posture posture_for(AgentState s, const SwimmerGeometry& g, double X) {
  return Posture{X, arm_length(s.arm1(), g), arm_length(s.arm2(), g)};
}

bool posture_matches(const Posture& p, AgentState s, const SwimmerGeometry& g,
                     double tol) {
  const Posture ref = posture_for(s, g, p.X);
  const double scale = tol * g.W;
  return std::abs(p.L1 - ref.L1) <= scale && std::abs(p.L2 - ref.L2) <= scale;
}

std::array<double, 2> arm_rates(AgentState s, Action a,
                                const SwimmerGeometry& g) {
  // Extended arms contract, contracted arms extend.
  const double rate = s.arm(a) == Arm::extended ? -g.S : g.S;
  if (a == Action::move_arm1) return {rate, 0.0};
  return {0.0, rate};
}

std::vector<ArmSample> arm_trajectory(AgentState s, Action a,
                                      const SwimmerGeometry& g,
                                      int n_substeps) {
  if (n_substeps < 1) {
    throw PreconditionError("arm_trajectory: n_substeps must be >= 1");
  }
  const Posture start = posture_for(s, g);
  const Posture end = posture_for(transition(s, a), g);
  const auto rates = arm_rates(s, a, g);
  const double duration = g.action_duration();

  std::vector<ArmSample> out;
  out.reserve(static_cast<std::size_t>(n_substeps) + 1);
  for (int k = 0; k <= n_substeps; ++k) {
    const double f = static_cast<double>(k) / n_substeps;
    ArmSample smp{};
    smp.t = f * duration;
    // Interpolate between exact endpoints so the final sample is exact.
    smp.L1 = start.L1 + f * (end.L1 - start.L1);
    smp.L2 = start.L2 + f * (end.L2 - start.L2);
    if (k == n_substeps) {
      smp.L1 = end.L1;
      smp.L2 = end.L2;
    }
    smp.dL1 = rates[0];
    smp.dL2 = rates[1];
    out.push_back(smp);
  }
  return out;
}

}  // namespace trisphere
