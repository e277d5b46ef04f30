#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "trisphere/environment.hpp"
#include "trisphere/kinematics.hpp"
#include "trisphere/rl.hpp"
#include "trisphere/rng.hpp"

namespace trisphere {

/// Reward channels carried by the model, in fixture-key order.
/// r_disp is fitted for diagnostics; surrogate_step emits delta for it.
inline constexpr std::array<RewardChannel, 3> kModelChannels = kAllChannels;
std::string_view channel_key(RewardChannel ch);  // "r_disp", "r_acc", "r_diff"

/// Per (state, action) affine reward model:
///   X_next = X + delta(s, a)
///   r_ch   = c0(ch, s, a) + c1(ch, s, a) * X + eta(ch, s, a) * N(0, 1)
/// Units: delta and X in R; r_acc in C*D*R*(w/S); r_diff in C*D*R, where C is
/// the concentration scale of the log the model was fitted from.
struct AffineRewardModel {
  using Table = std::array<std::array<double, 2>, 4>;

  Table delta{};
  std::array<Table, 3> c0{};
  std::array<Table, 3> c1{};
  std::array<Table, 3> eta{};
  /// Free-form descriptive entries, e.g. the Peclet number of the source log.
  std::map<std::string, std::string> meta;

  static std::size_t channel_index(RewardChannel ch) {
    return static_cast<std::size_t>(ch) - 1;
  }
  double& d(AgentState s, Action a) {
    return delta[s.label() - 1][action_label(a) - 1];
  }
  double d(AgentState s, Action a) const {
    return delta[s.label() - 1][action_label(a) - 1];
  }
  double& coef0(RewardChannel ch, AgentState s, Action a) {
    return c0[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }
  double coef0(RewardChannel ch, AgentState s, Action a) const {
    return c0[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }
  double& coef1(RewardChannel ch, AgentState s, Action a) {
    return c1[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }
  double coef1(RewardChannel ch, AgentState s, Action a) const {
    return c1[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }
  double& noise(RewardChannel ch, AgentState s, Action a) {
    return eta[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }
  double noise(RewardChannel ch, AgentState s, Action a) const {
    return eta[channel_index(ch)][s.label() - 1][action_label(a) - 1];
  }

  /// Throws PreconditionError on non-finite entries or negative eta.
  void validate() const;
};

inline constexpr std::size_t kMinFitSamples = 10;

/// Least-squares line of each reward channel against X_before per (s, a);
/// eta is the residual standard deviation (divisor n - 2), delta the mean
/// displacement. Throws PreconditionError when any (s, a) has fewer than
/// kMinFitSamples samples or no spread in X_before.
AffineRewardModel fit_affine(std::span<const Experience> log);

struct SurrogateOutcome {
  AgentState s_next{Arm::extended, Arm::extended};
  double r_disp = 0.0;
  double r_acc = 0.0;
  double r_diff = 0.0;
  double X_next = 0.0;
};

/// One draw of the model. Draws exactly two normals, for r_acc then r_diff,
/// whether or not eta is zero, so the stream does not depend on eta.
SurrogateOutcome surrogate_step(const AffineRewardModel& m, AgentState s,
                                Action a, double X, Rng& rng);

/// Copy of m with every chemo-channel eta multiplied by `factor`.
AffineRewardModel scale_noise(AffineRewardModel m, double factor);
/// Copy of m with every chemo-channel eta set to `eta`.
AffineRewardModel with_noise(AffineRewardModel m, double eta);
/// Copy of m with every chemo-channel c1 set to zero.
AffineRewardModel stationary(AffineRewardModel m);

class SurrogateEnvironment final : public Environment {
 public:
  SurrogateEnvironment(AffineRewardModel model, AgentState s0, double X0,
                       std::uint64_t seed, double action_duration = 1.0);

  AgentState state() const override { return state_; }
  StepOutcome step(Action a) override;
  double position() const { return X_; }

 private:
  AffineRewardModel model_;
  AgentState state_;
  double X_;
  Rng rng_;
  double duration_;
  double t_ = 0.0;
};

/// Flat `key = value` text, one entry per line, '#' comments. Keys:
/// delta.s.a, c0.<channel>.s.a, c1.<channel>.s.a, eta.<channel>.s.a and
/// meta.<name>. Numbers are written with 17 significant digits.
void write_model(std::ostream& os, const AffineRewardModel& m);
void save_model(const std::string& path, const AffineRewardModel& m);
/// Throws PreconditionError on unknown or missing keys or bad numbers.
AffineRewardModel read_model(std::istream& is);
AffineRewardModel load_model(const std::string& path);

}  // namespace trisphere
