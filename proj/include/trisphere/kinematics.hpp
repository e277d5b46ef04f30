#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace trisphere {

/// Raised when an argument violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometry and scales of the three-sphere swimmer.
///
/// Arms vary between W - w (contracted) and W (extended). The spheres never
/// overlap as long as W - w > 2R.
struct SwimmerGeometry {
  double R = 1.0;    // sphere radius
  double W = 10.0;   // maximum arm length
  double w = 6.0;    // arm stroke
  double S = 1.0;    // arm speed
  double mu = 1.0;   // dynamic viscosity

  void validate() const;

  double contracted_length() const { return W - w; }
  double extended_length() const { return W; }
  /// Duration of one action (one arm stroke).
  double action_duration() const { return w / S; }
  /// Duration of the four-stroke swimming gait.
  double gait_period() const { return 4.0 * w / S; }
};

struct Posture {
  double X = 0.0;   // center of mass
  double L1 = 0.0;  // arm between spheres 1 and 2
  double L2 = 0.0;  // arm between spheres 2 and 3
};

enum class Arm : std::uint8_t { contracted = 0, extended = 1 };

enum class Action : std::uint8_t { move_arm1 = 1, move_arm2 = 2 };

int action_label(Action a);
Action action_from_label(int label);

/// Discrete agent state. Labels follow the (arm1, arm2) pairs
/// 1=(c,c), 2=(c,e), 3=(e,c), 4=(e,e).
class AgentState {
 public:
  AgentState(Arm arm1, Arm arm2) : arm1_(arm1), arm2_(arm2) {}

  static AgentState from_label(int label);

  int label() const {
    return 1 + 2 * static_cast<int>(arm1_) + static_cast<int>(arm2_);
  }
  Arm arm1() const { return arm1_; }
  Arm arm2() const { return arm2_; }
  Arm arm(Action a) const { return a == Action::move_arm1 ? arm1_ : arm2_; }

  friend bool operator==(AgentState, AgentState) = default;

 private:
  Arm arm1_;
  Arm arm2_;
};

inline constexpr int kNumStates = 4;
inline constexpr int kNumActions = 2;

/// Center positions of the three spheres for a posture.
std::array<double, 3> sphere_positions(double X, double L1, double L2);
inline std::array<double, 3> sphere_positions(const Posture& p) {
  return sphere_positions(p.X, p.L1, p.L2);
}

/// Toggles the arm moved by the action. Independent of the environment.
AgentState transition(AgentState s, Action a);

/// The right-swimming gait: arm 1 in states 1 and 4, arm 2 in states 2 and 3.
Action gait_action(AgentState s);

/// Arm lengths of the posture matching a discrete state.
Posture posture_for(AgentState s, const SwimmerGeometry& g, double X = 0.0);

/// True when the posture's arm lengths equal those of state s within tol.
bool posture_matches(const Posture& p, AgentState s, const SwimmerGeometry& g,
                     double tol = 1e-9);

struct ArmSample {
  double t;  // time since the start of the action
  double L1;
  double L2;
  double dL1;
  double dL2;
};

/// Arm lengths and rates at n_substeps + 1 equally spaced instants over one
/// action of duration w/S. The moving arm ramps linearly at speed S.
std::vector<ArmSample> arm_trajectory(AgentState s, Action a,
                                      const SwimmerGeometry& g,
                                      int n_substeps);

/// Arm rates (dL1/dt, dL2/dt) while performing action a from state s.
std::array<double, 2> arm_rates(AgentState s, Action a,
                                const SwimmerGeometry& g);

}  // namespace trisphere
