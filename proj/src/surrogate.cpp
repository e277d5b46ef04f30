#include "trisphere/surrogate.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace trisphere {

std::string_view channel_key(RewardChannel ch) {
  switch (ch) {
    case RewardChannel::displacement: return "r_disp";
    case RewardChannel::accumulation: return "r_acc";
    case RewardChannel::increase: return "r_diff";
  }
  return "?";
}

void AffineRewardModel::validate() const {
  auto check = [](const Table& t, const char* what, bool nonneg) {
    for (const auto& row : t) {
      for (double v : row) {
        if (!std::isfinite(v)) {
          throw PreconditionError(fmt::format("model: non-finite {}", what));
        }
        if (nonneg && v < 0.0) {
          throw PreconditionError(fmt::format("model: negative {}", what));
        }
      }
    }
  };
  check(delta, "delta", false);
  for (std::size_t c = 0; c < 3; ++c) {
    check(c0[c], "c0", false);
    check(c1[c], "c1", false);
    check(eta[c], "eta", true);
  }
}

AffineRewardModel fit_affine(std::span<const Experience> log) {
  std::array<std::array<std::vector<const Experience*>, 2>, 4> groups;
  for (const auto& e : log) {
    groups[e.s.label() - 1][action_label(e.a) - 1].push_back(&e);
  }
  AffineRewardModel m;
  for (int sl = 1; sl <= kNumStates; ++sl) {
    for (int al = 1; al <= kNumActions; ++al) {
      const auto& g = groups[sl - 1][al - 1];
      if (g.size() < kMinFitSamples) {
        throw PreconditionError(fmt::format(
            "fit_affine: {} samples for (s={}, a={}), need at least {}",
            g.size(), sl, al, kMinFitSamples));
      }
      const auto n = static_cast<double>(g.size());
      double xbar = 0.0, dbar = 0.0;
      for (const auto* e : g) {
        xbar += e->X_before;
        dbar += e->X_after - e->X_before;
      }
      xbar /= n;
      dbar /= n;
      double sxx = 0.0;
      for (const auto* e : g) sxx += (e->X_before - xbar) * (e->X_before - xbar);
      if (!(sxx > 0.0)) {
        throw PreconditionError(fmt::format(
            "fit_affine: no spread in X for (s={}, a={})", sl, al));
      }
      m.delta[sl - 1][al - 1] = dbar;
      for (RewardChannel ch : kModelChannels) {
        double rbar = 0.0;
        for (const auto* e : g) rbar += e->reward(ch);
        rbar /= n;
        double sxr = 0.0;
        for (const auto* e : g) sxr += (e->X_before - xbar) * (e->reward(ch) - rbar);
        const double slope = sxr / sxx;
        const double intercept = rbar - slope * xbar;
        double ss = 0.0;
        for (const auto* e : g) {
          const double res = e->reward(ch) - (intercept + slope * e->X_before);
          ss += res * res;
        }
        const std::size_t c = AffineRewardModel::channel_index(ch);
        m.c0[c][sl - 1][al - 1] = intercept;
        m.c1[c][sl - 1][al - 1] = slope;
        m.eta[c][sl - 1][al - 1] = std::sqrt(ss / (n - 2.0));
      }
    }
  }
  m.meta["samples"] = std::to_string(log.size());
  return m;
}

SurrogateOutcome surrogate_step(const AffineRewardModel& m, AgentState s,
                                Action a, double X, Rng& rng) {
  SurrogateOutcome out;
  out.s_next = transition(s, a);
  out.r_disp = m.d(s, a);
  out.X_next = X + out.r_disp;
  auto draw = [&](RewardChannel ch) {
    const double z = rng.normal();
    return m.coef0(ch, s, a) + m.coef1(ch, s, a) * X + m.noise(ch, s, a) * z;
  };
  out.r_acc = draw(RewardChannel::accumulation);
  out.r_diff = draw(RewardChannel::increase);
  return out;
}

namespace {

template <typename F>
AffineRewardModel map_chemo(AffineRewardModel m, F f) {
  for (RewardChannel ch : {RewardChannel::accumulation, RewardChannel::increase}) {
    const std::size_t c = AffineRewardModel::channel_index(ch);
    for (int sl = 0; sl < kNumStates; ++sl) {
      for (int al = 0; al < kNumActions; ++al) f(m, c, sl, al);
    }
  }
  return m;
}

}  // namespace

AffineRewardModel scale_noise(AffineRewardModel m, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw PreconditionError("scale_noise: factor must be finite and >= 0");
  }
  return map_chemo(std::move(m), [factor](AffineRewardModel& x, std::size_t c,
                                          int sl, int al) {
    x.eta[c][sl][al] *= factor;
  });
}

AffineRewardModel with_noise(AffineRewardModel m, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw PreconditionError("with_noise: eta must be finite and >= 0");
  }
  return map_chemo(std::move(m), [eta](AffineRewardModel& x, std::size_t c,
                                       int sl, int al) { x.eta[c][sl][al] = eta; });
}

AffineRewardModel stationary(AffineRewardModel m) {
  return map_chemo(std::move(m), [](AffineRewardModel& x, std::size_t c, int sl,
                                    int al) { x.c1[c][sl][al] = 0.0; });
}

SurrogateEnvironment::SurrogateEnvironment(AffineRewardModel model,
                                           AgentState s0, double X0,
                                           std::uint64_t seed,
                                           double action_duration)
    : model_(std::move(model)),
      state_(s0),
      X_(X0),
      rng_(seed),
      duration_(action_duration) {
  model_.validate();
  if (!(action_duration > 0.0)) {
    throw PreconditionError("surrogate: action duration must be > 0");
  }
}

StepOutcome SurrogateEnvironment::step(Action a) {
  const SurrogateOutcome o = surrogate_step(model_, state_, a, X_, rng_);
  StepOutcome out;
  out.t = t_;
  out.s_next = o.s_next;
  out.r_disp = o.r_disp;
  out.r_acc = o.r_acc;
  out.r_diff = o.r_diff;
  out.X_before = X_;
  out.X_after = o.X_next;
  state_ = o.s_next;
  X_ = o.X_next;
  t_ += duration_;
  return out;
}

// ---------------------------------------------------------------------------
// Fixture I/O

namespace {

std::string sa_suffix(int sl, int al) { return fmt::format("{}.{}", sl, al); }

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r");
  return std::string(v.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw PreconditionError(
        fmt::format("model: bad number '{}' for key '{}'", text, key));
  }
  return v;
}

}  // namespace

void write_model(std::ostream& os, const AffineRewardModel& m) {
  os << "# affine reward model: X_next = X + delta; r = c0 + c1*X + eta*N(0,1)\n";
  for (const auto& [k, v] : m.meta) os << "meta." << k << " = " << v << '\n';
  for (int sl = 1; sl <= kNumStates; ++sl) {
    for (int al = 1; al <= kNumActions; ++al) {
      os << fmt::format("delta.{} = {:.17g}\n", sa_suffix(sl, al),
                        m.delta[sl - 1][al - 1]);
    }
  }
  const std::array<std::pair<const char*, const std::array<AffineRewardModel::Table, 3>*>, 3>
      blocks{{{"c0", &m.c0}, {"c1", &m.c1}, {"eta", &m.eta}}};
  for (const auto& [name, tables] : blocks) {
    for (RewardChannel ch : kModelChannels) {
      const auto& t = (*tables)[AffineRewardModel::channel_index(ch)];
      for (int sl = 1; sl <= kNumStates; ++sl) {
        for (int al = 1; al <= kNumActions; ++al) {
          os << fmt::format("{}.{}.{} = {:.17g}\n", name, channel_key(ch),
                            sa_suffix(sl, al), t[sl - 1][al - 1]);
        }
      }
    }
  }
}

void save_model(const std::string& path, const AffineRewardModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_model(os, m);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

AffineRewardModel read_model(std::istream& is) {
  AffineRewardModel m;
  std::map<std::string, double*> slots;
  for (int sl = 1; sl <= kNumStates; ++sl) {
    for (int al = 1; al <= kNumActions; ++al) {
      slots["delta." + sa_suffix(sl, al)] = &m.delta[sl - 1][al - 1];
      for (RewardChannel ch : kModelChannels) {
        const std::size_t c = AffineRewardModel::channel_index(ch);
        const std::string mid = fmt::format("{}.{}", channel_key(ch), sa_suffix(sl, al));
        slots["c0." + mid] = &m.c0[c][sl - 1][al - 1];
        slots["c1." + mid] = &m.c1[c][sl - 1][al - 1];
        slots["eta." + mid] = &m.eta[c][sl - 1][al - 1];
      }
    }
  }
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(fmt::format("model: line {}: expected key = value", lineno));
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw PreconditionError(fmt::format("model: duplicate key '{}'", key));
    }
    if (key.rfind("meta.", 0) == 0) {
      m.meta[key.substr(5)] = value;
      continue;
    }
    const auto it = slots.find(key);
    if (it == slots.end()) {
      throw PreconditionError(fmt::format("model: unknown key '{}'", key));
    }
    *it->second = parse_double(value, key);
  }
  for (const auto& [key, ptr] : slots) {
    if (!seen.count(key)) {
      throw PreconditionError(fmt::format("model: missing key '{}'", key));
    }
  }
  m.validate();
  return m;
}

AffineRewardModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open model file '" + path + "'");
  return read_model(is);
}

}  // namespace trisphere
