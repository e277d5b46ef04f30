#pragma once
// Independent reference computations used only by the tests. None of these
// call into the library's numerical kernels.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Capacitance of equal collinear spheres by iterated image charges.
//
// Every sphere is held at unit potential. Start with a charge R at each
// center; repeatedly image each new charge in every other sphere (Kelvin
// inversion: q' = -q R / d at distance R^2 / d from that center) until the
// newest generation is negligible. The capacitance, in units of 4 pi eps, is
// the total charge. For absorbing spheres with C = 1 far away the steady
// flux is 4 pi D times the capacitance.
inline double collinear_capacitance(const std::vector<double>& centers, double R,
                                    double rel_tol = 1e-15, int max_generations = 200) {
  struct Charge {
    double x;
    double q;
    std::size_t owner;
  };
  std::vector<Charge> gen;
  for (std::size_t i = 0; i < centers.size(); ++i) gen.push_back({centers[i], R, i});
  double total = R * static_cast<double>(centers.size());
  for (int k = 0; k < max_generations && !gen.empty(); ++k) {
    std::vector<Charge> next;
    double added = 0.0;
    for (const auto& c : gen) {
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (j == c.owner) continue;
        const double d = c.x - centers[j];
        const double q = -c.q * R / std::abs(d);
        next.push_back({centers[j] + R * R / d, q, j});
        added += q;
      }
    }
    total += added;
    if (std::abs(added) < rel_tol * std::abs(total)) break;
    // Charges below the tolerance no longer matter.
    std::erase_if(next, [&](const Charge& c) { return std::abs(c.q) < 1e-3 * rel_tol * R; });
    gen = std::move(next);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Three-sphere swimmer with point-force interactions, integrated with
// classical RK4 on the center-sphere position.
//
// Unknowns F1, F2, F3 and V2 from
//   V_i = F_i / (6 pi mu R) + sum_{j != i} F_j / (4 pi mu |x_i - x_j|)
//   V1 = V2 - dL1, V3 = V2 + dL2, F1 + F2 + F3 = 0.
// Then dX/dt = V2 + (dL2 - dL1) / 3.
struct SwimmerOracle {
  double R = 1.0, W = 10.0, w = 6.0, S = 1.0, mu = 1.0;

  double center_velocity(double L1, double L2, double dL1, double dL2) const {
    const double a = 1.0 / (6.0 * std::numbers::pi * mu * R);
    auto b = [&](double r) { return 1.0 / (4.0 * std::numbers::pi * mu * r); };
    // Rows: velocity of spheres 1, 2, 3 and force balance; columns F1 F2 F3 V2.
    double M[4][5] = {
        {a, b(L1), b(L1 + L2), -1.0, -dL1},
        {b(L1), a, b(L2), -1.0, 0.0},
        {b(L1 + L2), b(L2), a, -1.0, dL2},
        {1.0, 1.0, 1.0, 0.0, 0.0},
    };
    // Gaussian elimination with partial pivoting.
    for (int c = 0; c < 4; ++c) {
      int p = c;
      for (int r = c + 1; r < 4; ++r) {
        if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
      }
      for (int k = 0; k < 5; ++k) std::swap(M[c][k], M[p][k]);
      for (int r = 0; r < 4; ++r) {
        if (r == c) continue;
        const double f = M[r][c] / M[c][c];
        for (int k = c; k < 5; ++k) M[r][k] -= f * M[c][k];
      }
    }
    const double V2 = M[3][4] / M[3][3];
    return V2 + (dL2 - dL1) / 3.0;
  }

  // Displacement of one stroke of arm `arm` (1 or 2), from (L1, L2) with the
  // arm moving at `rate` (+S extends, -S contracts) for time w / S.
  double stroke(double& L1, double& L2, int arm, double rate, int n) const {
    const double T = w / S;
    const double h = T / n;
    double X = 0.0;
    auto lengths = [&](double t) {
      return arm == 1 ? std::pair{L1 + rate * t, L2} : std::pair{L1, L2 + rate * t};
    };
    auto f = [&](double t) {
      const auto [l1, l2] = lengths(t);
      return arm == 1 ? center_velocity(l1, l2, rate, 0.0) : center_velocity(l1, l2, 0.0, rate);
    };
    for (int k = 0; k < n; ++k) {
      const double t = k * h;
      // dX/dt depends on t only, so RK4 reduces to Simpson's rule.
      X += h / 6.0 * (f(t) + 4.0 * f(t + 0.5 * h) + f(t + h));
    }
    std::tie(L1, L2) = lengths(T);
    return X;
  }

  // Rightward gait from both arms extended: contract 1, contract 2,
  // extend 1, extend 2.
  double gait(int n) const {
    double L1 = W, L2 = W;
    double X = 0.0;
    X += stroke(L1, L2, 1, -S, n);
    X += stroke(L1, L2, 2, -S, n);
    X += stroke(L1, L2, 1, +S, n);
    X += stroke(L1, L2, 2, +S, n);
    return X;
  }
};

// ---------------------------------------------------------------------------
// Four-state, two-action deterministic MDP.
//
// States 1..4 encode (arm1, arm2) as 1 + 2*arm1 + arm2; action a toggles
// arm a. Rewards r[s-1][a-1].
inline int next_state(int s, int a) {
  int arm1 = (s - 1) / 2, arm2 = (s - 1) % 2;
  if (a == 1) arm1 ^= 1; else arm2 ^= 1;
  return 1 + 2 * arm1 + arm2;
}

using RewardTable = std::array<std::array<double, 2>, 4>;

// Optimal action per state (1 or 2, or 0 when both are optimal within tol)
// from exact value iteration to machine precision.
inline std::array<int, 4> value_iteration_policy(const RewardTable& r, double gamma) {
  std::array<double, 4> V{};
  for (int it = 0; it < 100000; ++it) {
    std::array<double, 4> Vn{};
    double diff = 0.0;
    for (int s = 1; s <= 4; ++s) {
      Vn[s - 1] = std::max(r[s - 1][0] + gamma * V[next_state(s, 1) - 1],
                           r[s - 1][1] + gamma * V[next_state(s, 2) - 1]);
      diff = std::max(diff, std::abs(Vn[s - 1] - V[s - 1]));
    }
    V = Vn;
    if (diff < 1e-15 * (1.0 + std::abs(V[0]))) break;
  }
  std::array<int, 4> pi{};
  for (int s = 1; s <= 4; ++s) {
    const double q1 = r[s - 1][0] + gamma * V[next_state(s, 1) - 1];
    const double q2 = r[s - 1][1] + gamma * V[next_state(s, 2) - 1];
    const double tol = 1e-9 * std::max(1.0, std::max(std::abs(q1), std::abs(q2)));
    pi[s - 1] = std::abs(q1 - q2) <= tol ? 0 : (q1 > q2 ? 1 : 2);
  }
  return pi;
}

// All 16 deterministic policies, encoded as the action taken in states 1..4.
inline std::vector<std::array<int, 4>> all_policies() {
  std::vector<std::array<int, 4>> out;
  for (int m = 0; m < 16; ++m) {
    out.push_back({1 + (m & 1), 1 + ((m >> 1) & 1), 1 + ((m >> 2) & 1), 1 + ((m >> 3) & 1)});
  }
  return out;
}

// Discounted return of a deterministic policy from s0 when the reward
// depends on state, action and position X, and X advances by delta(s, a).
inline double policy_return(const std::array<int, 4>& pi, int s0, double gamma, int horizon,
                            const RewardTable& delta,
                            const std::function<double(int, int, double)>& reward) {
  double X = 0.0, total = 0.0, disc = 1.0;
  int s = s0;
  for (int k = 0; k < horizon; ++k) {
    const int a = pi[s - 1];
    total += disc * reward(s, a, X);
    X += delta[s - 1][a - 1];
    s = next_state(s, a);
    disc *= gamma;
  }
  return total;
}

}  // namespace oracle
