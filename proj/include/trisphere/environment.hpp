#pragma once

#include "trisphere/kinematics.hpp"

namespace trisphere {

/// Outcome of one agent action, carrying every reward channel.
struct StepOutcome {
  AgentState s_next{Arm::extended, Arm::extended};
  double r_disp = 0.0;  // X_{t+1} - X_t
  double r_acc = 0.0;   // integral of J over the action
  double r_diff = 0.0;  // J(t+1) - J(t)
  double X_before = 0.0;
  double X_after = 0.0;
  double t = 0.0;       // time at the start of the action
};

/// Something the agent acts on: the coupled simulation or a surrogate.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual AgentState state() const = 0;
  virtual StepOutcome step(Action a) = 0;
};

}  // namespace trisphere
