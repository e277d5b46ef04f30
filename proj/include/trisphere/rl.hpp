#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "trisphere/environment.hpp"
#include "trisphere/kinematics.hpp"

namespace trisphere {

enum class RewardChannel : std::uint8_t {
  displacement = 1,  // R1
  accumulation = 2,  // R2
  increase = 3,      // R3
};

std::string_view channel_name(RewardChannel ch);  // "R1", "R2", "R3"
RewardChannel channel_from_name(std::string_view name);
inline constexpr std::array<RewardChannel, 3> kAllChannels = {
    RewardChannel::displacement, RewardChannel::accumulation,
    RewardChannel::increase};

struct Experience {
  double t = 0.0;
  AgentState s{Arm::extended, Arm::extended};
  Action a = Action::move_arm1;
  AgentState s_next{Arm::extended, Arm::extended};
  double r_disp = 0.0;
  double r_acc = 0.0;
  double r_diff = 0.0;
  double X_before = 0.0;
  double X_after = 0.0;

  double reward(RewardChannel ch) const;
};

/// 4x2 action values, zero-initialized. Indexed by state and action labels.
class QMatrix {
 public:
  double operator()(AgentState s, Action a) const {
    return q_[s.label() - 1][action_label(a) - 1];
  }
  double& operator()(AgentState s, Action a) {
    return q_[s.label() - 1][action_label(a) - 1];
  }
  double row_max(AgentState s) const;
  double max_abs() const;

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  std::array<std::array<double, 2>, 4> q_{};
};

struct LearningParams {
  double alpha = 0.5;
  double gamma = 0.9;
  void validate() const;
};

/// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')).
QMatrix q_update(QMatrix Q, AgentState s, Action a, AgentState s_next,
                 double r, const LearningParams& p);

/// Folds q_update over the experiences in log order, starting from zeros.
QMatrix run_qlearning(std::span<const Experience> experiences,
                      const LearningParams& p, RewardChannel ch);

/// pi(s, a) as a 4x2 table. Rows sum to one.
struct Policy {
  std::array<std::array<double, 2>, 4> p{};
  double operator()(AgentState s, Action a) const {
    return p[s.label() - 1][action_label(a) - 1];
  }
};

struct GreedyPolicy {
  Policy policy;
  std::array<bool, 4> tied{};
  bool any_tie() const;
};

inline constexpr double kDefaultTieEpsilon = 1e-12;

/// Greedy in Q. A state is tied when
/// |Q(s,1) - Q(s,2)| <= tie_epsilon * max(1, |Q|_inf); its row is (0.5, 0.5).
GreedyPolicy greedy_policy(const QMatrix& Q,
                           double tie_epsilon = kDefaultTieEpsilon);

/// The deterministic right-swimming gait as a policy table.
Policy gait_policy();
/// Its mirror image, the left-swimming gait.
Policy mirror_gait_policy();

/// True iff no state is tied and the policy is the right-swimming gait.
bool is_success(const GreedyPolicy& gp);
/// Same test against the left-swimming gait (diagnostic only).
bool is_mirror_success(const GreedyPolicy& gp);

struct BatchRange {
  std::size_t start = 0;
  std::size_t size = 0;
};

/// n_batches windows of B consecutive experiences out of `total`. Disjoint
/// blocks when total == n_batches * B, otherwise windows starting at
/// k * floor((total - B) / (n_batches - 1)).
std::vector<BatchRange> make_batches(std::size_t total, std::size_t B,
                                     std::size_t n_batches);

struct SweepResult {
  std::vector<double> gammas;
  std::vector<double> alphas;
  /// success[g][a]: fraction of batches whose greedy policy is the gait.
  std::vector<std::vector<double>> success;
  std::vector<std::vector<double>> mirror_success;
  /// Per batch: fraction of (gamma, alpha) pairs that succeeded.
  std::vector<double> batch_total;
  std::size_t n_batches = 0;

  /// Sum over the grid of success rates divided by the grid size.
  double grid_mean() const;
};

std::vector<double> default_gamma_grid();
std::vector<double> default_alpha_grid();

SweepResult sweep(std::span<const Experience> experiences,
                  const std::vector<BatchRange>& batches,
                  const std::vector<double>& gammas,
                  const std::vector<double>& alphas, RewardChannel ch,
                  double tie_epsilon = kDefaultTieEpsilon);

/// Uniform random policy for n_actions steps on env, seeded.
std::vector<Experience> rollout_random(Environment& env, std::size_t n_actions,
                                       std::uint64_t seed);

/// Experience built from an environment step.
Experience to_experience(AgentState s, Action a, const StepOutcome& o);

}  // namespace trisphere
