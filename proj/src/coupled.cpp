#include "trisphere/coupled.hpp"

#include <algorithm>
#include <cmath>

namespace trisphere {

ActionSource gait_source() {
  return [](AgentState s, std::size_t) { return gait_action(s); };
}

ActionSource sequence_source(std::vector<Action> actions) {
  return [actions = std::move(actions)](AgentState, std::size_t k) {
    return actions.at(k % actions.size());
  };
}

ActionSource random_source(Rng& rng) {
  return [&rng](AgentState, std::size_t) {
    return rng.coin() ? Action::move_arm2 : Action::move_arm1;
  };
}

CoupledSimulation::CoupledSimulation(const SwimmerGeometry& geo,
                                     const TransportConfig& cfg, AgentState s0,
                                     double X0, CoupledOptions opt)
    : geo_(geo),
      opt_(opt),
      solver_(geo, cfg),
      state_(s0),
      posture_(posture_for(s0, geo, X0)) {
  if (opt_.hydro_substeps < 1) {
    throw PreconditionError("coupled: hydro_substeps must be >= 1");
  }
  solver_.set_window_center(X0);
  solver_.set_spheres(swimmer_bodies(posture_, geo_));
}

void CoupledSimulation::initialize_steady() {
  solver_.solve_steady();
  records_.clear();
  records_.push_back({time_, state_.label(), 0, posture_.X, solver_.flux()});
}

int CoupledSimulation::steps_for_action(AgentState s, Action a) const {
  const double duration = geo_.action_duration();
  const auto& cfg = solver_.config();
  const double dt_max = cfg.dt_max > 0.0 ? cfg.dt_max : 0.1 * duration;
  const Posture start = posture_for(s, geo_);
  const Posture end = posture_for(transition(s, a), geo_);
  const auto rates = arm_rates(s, a, geo_);
  double vmax = 0.0;
  constexpr int kSamples = 16;
  for (int k = 0; k <= kSamples; ++k) {
    const double f = static_cast<double>(k) / kSamples;
    const auto pos = sphere_positions(0.0, start.L1 + f * (end.L1 - start.L1),
                                      start.L2 + f * (end.L2 - start.L2));
    const auto sol = solve_mobility(pos, rates, geo_);
    for (double v : sol.velocity) vmax = std::max(vmax, std::abs(v));
  }
  const double travel = vmax * duration / (cfg.mask_cfl * solver_.grid().h());
  const int by_dt = static_cast<int>(std::ceil(duration / dt_max - 1e-9));
  const int by_mask = static_cast<int>(std::ceil(travel - 1e-9));
  return std::max({1, by_dt, by_mask});
}

StepOutcome CoupledSimulation::step(Action a) {
  if (records_.empty()) {
    records_.push_back({time_, state_.label(), 0, posture_.X, solver_.flux()});
  }
  const AgentState s = state_;
  const AgentState s_next = transition(s, a);
  const Posture target = posture_for(s_next, geo_);
  const auto rates = arm_rates(s, a, geo_);
  const int n_steps = steps_for_action(s, a);
  // Even hydro substep count per transport step so that the step midpoint
  // falls on a substep boundary.
  const int m = 2 * std::max(1, (opt_.hydro_substeps + 2 * n_steps - 1) /
                                    (2 * n_steps));
  const double duration = geo_.action_duration();
  const double dt = duration / n_steps;
  const double h = dt / m;
  const int total_sub = n_steps * m;

  StepOutcome out;
  out.t = time_;
  out.X_before = posture_.X;
  const Posture start = posture_;
  const double J_start = solver_.flux();
  double J_prev = J_start;
  double accumulated = 0.0;
  double X = posture_.X;

  auto lengths_at = [&](int sub) {
    const double f = static_cast<double>(sub) / total_sub;
    return std::pair{start.L1 + f * (target.L1 - start.L1),
                     start.L2 + f * (target.L2 - start.L2)};
  };

  for (int k = 0; k < n_steps; ++k) {
    FlowModel flow_mid;
    for (int q = 0; q < m; ++q) {
      const int sub = k * m + q;
      if (q == m / 2) {
        const auto [L1, L2] = lengths_at(sub);
        const auto pos = sphere_positions(X, L1, L2);
        flow_mid = FlowModel::from_solution(pos, solve_mobility(pos, rates, geo_),
                                            geo_);
      }
      const double f = (sub + 0.5) / total_sub;
      const auto pos = sphere_positions(X, start.L1 + f * (target.L1 - start.L1),
                                        start.L2 + f * (target.L2 - start.L2));
      X += h * solve_mobility(pos, rates, geo_).vcm;
    }
    const auto [L1, L2] = lengths_at((k + 1) * m);
    const Posture p_end = (k + 1 == n_steps) ? Posture{X, target.L1, target.L2}
                                             : Posture{X, L1, L2};
    solver_.set_spheres(swimmer_bodies(p_end, geo_));
    solver_.advance(flow_mid, dt);
    const double J = solver_.flux();
    accumulated += 0.5 * (J_prev + J) * dt;
    J_prev = J;
    const double t = out.t + (k + 1 == n_steps ? duration : (k + 1) * dt);
    records_.push_back({t, s.label(), action_label(a), X, J});
  }

  posture_ = Posture{X, target.L1, target.L2};
  state_ = s_next;
  time_ = out.t + duration;

  solver_.recenter(posture_.X);
  solver_.set_spheres(swimmer_bodies(posture_, geo_));

  out.s_next = s_next;
  out.X_after = posture_.X;
  out.r_disp = out.X_after - out.X_before;
  out.r_acc = accumulated;
  out.r_diff = J_prev - J_start;
  return out;
}

CoupledResult run_coupled(const SwimmerGeometry& geo, ActionSource source,
                          const TransportConfig& cfg, std::size_t n_actions,
                          AgentState s0, CoupledOptions opt) {
  CoupledSimulation sim(geo, cfg, s0, 0.0, opt);
  sim.initialize_steady();
  CoupledResult res;
  res.actions.reserve(n_actions);
  for (std::size_t k = 0; k < n_actions; ++k) {
    res.actions.push_back(sim.step(source(sim.state(), k)));
  }
  res.records = sim.records();
  res.final_field = sim.solver().field();
  return res;
}

namespace {

// Integral of the piecewise-linear interpolant of J over [a, b].
double integrate_records(const std::vector<FluxRecord>& r, double a, double b) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double t0 = r[k].t, t1 = r[k + 1].t;
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi <= lo || t1 <= t0) continue;
    auto interp = [&](double t) {
      return r[k].J + (r[k + 1].J - r[k].J) * (t - t0) / (t1 - t0);
    };
    acc += 0.5 * (interp(lo) + interp(hi)) * (hi - lo);
  }
  return acc;
}

}  // namespace

PeriodAverage period_average_flux(const std::vector<FluxRecord>& records,
                                  double T, double rel_tol) {
  if (!(T > 0.0)) throw PreconditionError("period_average_flux: T must be > 0");
  if (records.size() < 2) {
    throw PreconditionError("period_average_flux: insufficient data");
  }
  const double t_first = records.front().t;
  const double t_last = records.back().t;
  const double span = t_last - t_first;
  const auto n_periods =
      static_cast<std::size_t>(std::floor(span / T * (1.0 + 1e-12)));
  if (n_periods < 2) {
    throw PreconditionError(
        "period_average_flux: records must span at least two periods");
  }
  PeriodAverage out;
  out.period_means.resize(n_periods);
  for (std::size_t k = 0; k < n_periods; ++k) {
    const double b = t_last - static_cast<double>(n_periods - 1 - k) * T;
    const double a = b - T;
    out.period_means[k] = integrate_records(records, a, b) / T;
  }
  auto agree = [&](double x, double y) {
    return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
  };
  out.mean = out.period_means.back();
  out.periodic = agree(out.period_means[n_periods - 1],
                       out.period_means[n_periods - 2]);
  for (std::size_t k = 1; k < n_periods; ++k) {
    if (agree(out.period_means[k], out.period_means[k - 1])) {
      out.development_time =
          t_last - static_cast<double>(n_periods - k) * T;
      break;
    }
  }
  return out;
}

}  // namespace trisphere
