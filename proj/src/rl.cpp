#include "trisphere/rl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trisphere/rng.hpp"

namespace trisphere {

std::string_view channel_name(RewardChannel ch) {
  switch (ch) {
    case RewardChannel::displacement: return "R1";
    case RewardChannel::accumulation: return "R2";
    case RewardChannel::increase: return "R3";
  }
  return "?";
}

RewardChannel channel_from_name(std::string_view name) {
  if (name == "R1") return RewardChannel::displacement;
  if (name == "R2") return RewardChannel::accumulation;
  if (name == "R3") return RewardChannel::increase;
  throw PreconditionError("unknown reward channel '" + std::string(name) + "'");
}

double Experience::reward(RewardChannel ch) const {
  switch (ch) {
    case RewardChannel::displacement: return r_disp;
    case RewardChannel::accumulation: return r_acc;
    case RewardChannel::increase: return r_diff;
  }
  return 0.0;
}

double QMatrix::row_max(AgentState s) const {
  const auto& row = q_[s.label() - 1];
  return std::max(row[0], row[1]);
}

double QMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& row : q_) {
    for (double v : row) m = std::max(m, std::abs(v));
  }
  return m;
}

void LearningParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw PreconditionError("learning rate alpha must lie in (0, 1]");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw PreconditionError("discount gamma must lie in (0, 1)");
  }
}

QMatrix q_update(QMatrix Q, AgentState s, Action a, AgentState s_next,
                 double r, const LearningParams& p) {
  const double target = r + p.gamma * Q.row_max(s_next);
  Q(s, a) = (1.0 - p.alpha) * Q(s, a) + p.alpha * target;
  return Q;
}

QMatrix run_qlearning(std::span<const Experience> experiences,
                      const LearningParams& p, RewardChannel ch) {
  if (experiences.empty()) {
    throw PreconditionError("run_qlearning: empty experience set");
  }
  p.validate();
  QMatrix Q;
  for (const auto& e : experiences) {
    Q = q_update(Q, e.s, e.a, e.s_next, e.reward(ch), p);
  }
  return Q;
}

bool GreedyPolicy::any_tie() const {
  return std::any_of(tied.begin(), tied.end(), [](bool t) { return t; });
}

GreedyPolicy greedy_policy(const QMatrix& Q, double tie_epsilon) {
  GreedyPolicy gp;
  const double tol = tie_epsilon * std::max(1.0, Q.max_abs());
  for (int label = 1; label <= kNumStates; ++label) {
    const auto s = AgentState::from_label(label);
    const double q1 = Q(s, Action::move_arm1);
    const double q2 = Q(s, Action::move_arm2);
    auto& row = gp.policy.p[label - 1];
    if (std::abs(q1 - q2) <= tol) {
      gp.tied[label - 1] = true;
      row = {0.5, 0.5};
    } else if (q1 > q2) {
      row = {1.0, 0.0};
    } else {
      row = {0.0, 1.0};
    }
  }
  return gp;
}

Policy gait_policy() {
  Policy p;
  for (int label = 1; label <= kNumStates; ++label) {
    const Action a = gait_action(AgentState::from_label(label));
    p.p[label - 1] = a == Action::move_arm1 ? std::array{1.0, 0.0}
                                            : std::array{0.0, 1.0};
  }
  return p;
}

Policy mirror_gait_policy() {
  Policy p = gait_policy();
  for (auto& row : p.p) std::swap(row[0], row[1]);
  return p;
}

static bool matches(const GreedyPolicy& gp, const Policy& ref) {
  if (gp.any_tie()) return false;
  return gp.policy.p == ref.p;
}

bool is_success(const GreedyPolicy& gp) { return matches(gp, gait_policy()); }

bool is_mirror_success(const GreedyPolicy& gp) {
  return matches(gp, mirror_gait_policy());
}

std::vector<BatchRange> make_batches(std::size_t total, std::size_t B,
                                     std::size_t n_batches) {
  if (B == 0 || n_batches == 0) {
    throw PreconditionError("make_batches: batch size and count must be > 0");
  }
  if (B > total) {
    throw PreconditionError("make_batches: batch size exceeds sequence length");
  }
  std::vector<BatchRange> out;
  out.reserve(n_batches);
  if (total == n_batches * B) {
    for (std::size_t k = 0; k < n_batches; ++k) out.push_back({k * B, B});
    return out;
  }
  if (n_batches == 1) {
    out.push_back({0, B});
    return out;
  }
  const std::size_t stride = (total - B) / (n_batches - 1);
  for (std::size_t k = 0; k < n_batches; ++k) out.push_back({k * stride, B});
  return out;
}

double SweepResult::grid_mean() const {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& row : success) {
    for (double v : row) {
      acc += v;
      ++n;
    }
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

std::vector<double> default_gamma_grid() {
  return {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99};
}

std::vector<double> default_alpha_grid() {
  return {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
}

SweepResult sweep(std::span<const Experience> experiences,
                  const std::vector<BatchRange>& batches,
                  const std::vector<double>& gammas,
                  const std::vector<double>& alphas, RewardChannel ch,
                  double tie_epsilon) {
  if (batches.empty() || gammas.empty() || alphas.empty()) {
    throw PreconditionError("sweep: empty batches or parameter grid");
  }
  SweepResult res;
  res.gammas = gammas;
  res.alphas = alphas;
  res.n_batches = batches.size();
  res.success.assign(gammas.size(), std::vector<double>(alphas.size(), 0.0));
  res.mirror_success = res.success;
  res.batch_total.assign(batches.size(), 0.0);

  std::vector<std::vector<std::size_t>> wins(
      gammas.size(), std::vector<std::size_t>(alphas.size(), 0));
  auto mirror_wins = wins;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& br = batches[b];
    if (br.start + br.size > experiences.size()) {
      throw PreconditionError("sweep: batch exceeds experience log");
    }
    const auto batch = experiences.subspan(br.start, br.size);
    std::size_t count = 0;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const QMatrix Q =
            run_qlearning(batch, LearningParams{alphas[ai], gammas[gi]}, ch);
        const GreedyPolicy gp = greedy_policy(Q, tie_epsilon);
        if (is_success(gp)) {
          ++wins[gi][ai];
          ++count;
        }
        if (is_mirror_success(gp)) ++mirror_wins[gi][ai];
      }
    }
    res.batch_total[b] = static_cast<double>(count) /
                         static_cast<double>(gammas.size() * alphas.size());
  }
  const auto nb = static_cast<double>(batches.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      res.success[gi][ai] = static_cast<double>(wins[gi][ai]) / nb;
      res.mirror_success[gi][ai] = static_cast<double>(mirror_wins[gi][ai]) / nb;
    }
  }
  return res;
}

Experience to_experience(AgentState s, Action a, const StepOutcome& o) {
  Experience e;
  e.t = o.t;
  e.s = s;
  e.a = a;
  e.s_next = o.s_next;
  e.r_disp = o.r_disp;
  e.r_acc = o.r_acc;
  e.r_diff = o.r_diff;
  e.X_before = o.X_before;
  e.X_after = o.X_after;
  return e;
}

std::vector<Experience> rollout_random(Environment& env, std::size_t n_actions,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Experience> log;
  log.reserve(n_actions);
  for (std::size_t k = 0; k < n_actions; ++k) {
    const AgentState s = env.state();
    const Action a = rng.coin() ? Action::move_arm2 : Action::move_arm1;
    log.push_back(to_experience(s, a, env.step(a)));
  }
  return log;
}

}  // namespace trisphere
