#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "trisphere/environment.hpp"
#include "trisphere/hydro.hpp"
#include "trisphere/rng.hpp"
#include "trisphere/transport.hpp"

namespace trisphere {

/// J at one transport step boundary. `a` is 0 on the initial row.
struct FluxRecord {
  double t = 0.0;
  int s = 0;
  int a = 0;
  double X = 0.0;
  double J = 0.0;
};

/// Chooses the next action given the current state and action count.
using ActionSource = std::function<Action(AgentState, std::size_t)>;

ActionSource gait_source();
ActionSource sequence_source(std::vector<Action> actions);
/// Uniform random actions drawn from `rng`, which must outlive the source.
ActionSource random_source(Rng& rng);

struct CoupledOptions {
  /// Minimum hydrodynamic substeps per action.
  int hydro_substeps = 200;
};

/// Hydrodynamics and solute transport advanced together, one action at a
/// time. The transport window follows the swimmer and is recentered after
/// every action.
class CoupledSimulation final : public Environment {
 public:
  CoupledSimulation(const SwimmerGeometry& geo, const TransportConfig& cfg,
                    AgentState s0, double X0 = 0.0, CoupledOptions opt = {});

  /// Steady diffusive field of the current (immobile) posture.
  void initialize_steady();

  AgentState state() const override { return state_; }
  StepOutcome step(Action a) override;

  double time() const { return time_; }
  const Posture& posture() const { return posture_; }
  double flux() const { return solver_.flux(); }
  const std::vector<FluxRecord>& records() const { return records_; }
  const TransportSolver& solver() const { return solver_; }
  TransportSolver& solver() { return solver_; }

  /// Transport steps used for an action from state s.
  int steps_for_action(AgentState s, Action a) const;

 private:
  SwimmerGeometry geo_;
  CoupledOptions opt_;
  TransportSolver solver_;
  AgentState state_;
  Posture posture_;
  double time_ = 0.0;
  std::vector<FluxRecord> records_;
};

struct CoupledResult {
  std::vector<FluxRecord> records;
  std::vector<StepOutcome> actions;
  ConcentrationField final_field;
};

/// Runs n_actions from the steady state of the initial posture.
CoupledResult run_coupled(const SwimmerGeometry& geo, ActionSource source,
                          const TransportConfig& cfg, std::size_t n_actions,
                          AgentState s0, CoupledOptions opt = {});

struct PeriodAverage {
  double mean = 0.0;              // average over the last full period
  bool periodic = false;          // last two period means agree within tol
  std::vector<double> period_means;
  /// Start of the first period whose mean agrees with its predecessor;
  /// nullopt when that never happens.
  std::optional<double> development_time;
};

/// Trapezoidal averages of J over consecutive windows of length T, counted
/// back from the last record.
PeriodAverage period_average_flux(const std::vector<FluxRecord>& records,
                                  double T, double rel_tol = 5e-3);

}  // namespace trisphere
