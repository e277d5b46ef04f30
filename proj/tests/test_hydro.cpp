#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trisphere/hydro.hpp"

using namespace trisphere;

namespace {

AgentState st(int label) { return AgentState::from_label(label); }

}  // namespace

TEST_CASE("mobility: zero arm rates give zero forces and velocity") {
  SwimmerGeometry g;
  const auto sol = solve_mobility({-10.0, 0.0, 10.0}, {0.0, 0.0}, g);
  for (double f : sol.force) CHECK(f == doctest::Approx(0.0));
  CHECK(sol.vcm == doctest::Approx(0.0));
}

TEST_CASE("mobility: force-free and kinematic constraints hold") {
  SwimmerGeometry g;
  for (auto [L1, L2] : {std::pair{10.0, 10.0}, {4.0, 10.0}, {7.0, 4.5}}) {
    for (auto rates : {std::array{-1.0, 0.0}, std::array{0.0, 1.0}, std::array{0.3, -0.7}}) {
      const auto x = sphere_positions(1.5, L1, L2);
      const auto sol = solve_mobility(x, rates, g);
      const double fmax = std::max({std::abs(sol.force[0]), std::abs(sol.force[1]),
                                    std::abs(sol.force[2])});
      CHECK(std::abs(sol.force[0] + sol.force[1] + sol.force[2]) <= 1e-12 * fmax);
      CHECK(sol.velocity[1] - sol.velocity[0] == doctest::Approx(rates[0]).epsilon(1e-13));
      CHECK(sol.velocity[2] - sol.velocity[1] == doctest::Approx(rates[1]).epsilon(1e-13));
      CHECK(sol.vcm == doctest::Approx((sol.velocity[0] + sol.velocity[1] + sol.velocity[2]) / 3.0)
                           .epsilon(1e-13));
    }
  }
}

TEST_CASE("mobility: mirror symmetry") {
  SwimmerGeometry g;
  const auto a = solve_mobility({-7.0, 0.0, 10.0}, {-1.0, 0.0}, g);
  // Mirror x -> -x: sphere order reverses, arm 1 and arm 2 swap.
  const auto b = solve_mobility({-10.0, 0.0, 7.0}, {0.0, -1.0}, g);
  CHECK(b.vcm == doctest::Approx(-a.vcm).epsilon(1e-13));
  CHECK(b.force[0] == doctest::Approx(-a.force[2]).epsilon(1e-13));
  CHECK(b.force[1] == doctest::Approx(-a.force[1]).epsilon(1e-13));
  CHECK(b.force[2] == doctest::Approx(-a.force[0]).epsilon(1e-13));
}

TEST_CASE("mobility: coincident or overlapping spheres are rejected") {
  SwimmerGeometry g;
  CHECK_THROWS_AS(solve_mobility({0.0, 0.0, 10.0}, {1.0, 0.0}, g), SingularSystemError);
  CHECK_THROWS_AS(solve_mobility({0.0, 1.5, 10.0}, {1.0, 0.0}, g), PreconditionError);
  CHECK_THROWS_AS(solve_mobility({0.0, -5.0, 10.0}, {1.0, 0.0}, g), PreconditionError);
}

TEST_CASE("reciprocal action pairs give no net displacement") {
  SwimmerGeometry g;
  for (int s = 1; s <= kNumStates; ++s) {
    for (Action a : {Action::move_arm1, Action::move_arm2}) {
      const double dX = sequence_displacement(st(s), {a, a}, g);
      CHECK(std::abs(dX) < 1e-10 * g.R);
    }
  }
  // Any sequence followed by its reverse returns to the start.
  const std::vector<Action> seq{Action::move_arm1, Action::move_arm2, Action::move_arm1,
                                Action::move_arm2, Action::move_arm2, Action::move_arm1,
                                Action::move_arm2, Action::move_arm1};
  CHECK(std::abs(sequence_displacement(st(4), seq, g)) < 1e-10);
}

TEST_CASE("integrate_action lands exactly on the toggled posture") {
  SwimmerGeometry g;
  const auto r = integrate_action(posture_for(st(4), g, 3.0), st(4), Action::move_arm1, g, 50);
  CHECK(posture_matches(r.end, st(2), g, 0.0));
  CHECK(r.end.X == doctest::Approx(3.0 + r.dX));
  CHECK(r.trajectory.size() == 50);
  CHECK_THROWS_AS(integrate_action(posture_for(st(1), g), st(4), Action::move_arm1, g),
                  PreconditionError);
}

TEST_CASE("gait: rightward, reversible, speed and viscosity independent") {
  SwimmerGeometry g;
  const double dX = gait_displacement(g);
  CHECK(dX > 0.0);
  const double reversed = sequence_displacement(
      st(4), {Action::move_arm2, Action::move_arm1, Action::move_arm2, Action::move_arm1}, g);
  CHECK(reversed == doctest::Approx(-dX).epsilon(1e-12));

  SwimmerGeometry h = g;
  h.S = 2.0;
  CHECK(gait_displacement(h) == doctest::Approx(dX).epsilon(1e-12));
  h.mu = 7.5;
  CHECK(gait_displacement(h) == doctest::Approx(dX).epsilon(1e-12));
  CHECK(gait_mean_velocity(g) == doctest::Approx(g.S * dX / (4.0 * g.w)));
}

TEST_CASE("gait displacement matches an independent fine RK4 integration") {
  for (double wR : {2.0, 4.0, 6.0}) {
    SwimmerGeometry g;
    g.w = wR;
    oracle::SwimmerOracle o;
    o.w = wR;
    const double ref = o.gait(10000);
    CHECK(gait_displacement(g, 10000) == doctest::Approx(ref).epsilon(1e-9));
    // Default resolution is within 1e-5 relative of the converged value.
    CHECK(gait_displacement(g) == doctest::Approx(ref).epsilon(1e-5));
  }
  // Frozen reference at W/R = 10, w/R = 6 from the oracle.
  CHECK(oracle::SwimmerOracle{}.gait(10000) == doctest::Approx(0.592158).epsilon(1e-6));
}

TEST_CASE("gait displacement: monotone in stroke, second-order in substeps") {
  double prev = 0.0;
  for (double wR : {0.5, 2.0, 4.0, 6.0}) {
    SwimmerGeometry g;
    g.w = wR;
    const double dX = gait_displacement(g);
    CHECK(dX > prev);
    prev = dX;
  }
  SwimmerGeometry g;
  const double a = gait_displacement(g, 50), b = gait_displacement(g, 100),
               c = gait_displacement(g, 200);
  const double order = std::log2((a - b) / (b - c));
  CHECK(order == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("flow: rigid velocity on the sphere, decay far away") {
  const FlowModel towed = FlowModel::towed_sphere(1.0, 0.0);  // lab frame, sphere at rest
  CHECK(flow_velocity(towed, 5.0, 1.0).ux == doctest::Approx(0.0));

  SwimmerGeometry g;
  const std::array<double, 3> x{-10.0, 0.0, 10.0};
  const auto sol = solve_mobility(x, {-1.0, 0.0}, g);
  const FlowModel m = FlowModel::from_solution(x, sol, g);
  // Inside and at the poles of each sphere the flow is the rigid velocity,
  // up to the disturbance of the other two spheres.
  for (int i = 0; i < 3; ++i) {
    CHECK(flow_velocity(m, x[i], 0.3).ux == doctest::Approx(sol.velocity[i]));
  }
  const double far = std::abs(flow_velocity(m, 1e4, 0.0).ux);
  const double farther = std::abs(flow_velocity(m, 1e5, 0.0).ux);
  CHECK(far < 1e-5);
  CHECK(farther < far);
}

TEST_CASE("flow: isolated sphere satisfies no-slip exactly") {
  // Single sphere moving at V in the lab frame.
  FlowModel m;
  m.spheres.push_back({0.0, 1.0, 0.8, 0.8});
  for (double theta : {0.0, 0.4, 1.2, 2.0, 3.0}) {
    const double x = std::cos(theta) * (1.0 + 1e-12), rho = std::sin(theta) * (1.0 + 1e-12);
    const auto u = flow_velocity(m, x, rho);
    CHECK(u.ux == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(u.urho == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("flow: finite-difference divergence vanishes at exterior points") {
  SwimmerGeometry g;
  const auto x = sphere_positions(0.0, 7.0, 10.0);
  const auto sol = solve_mobility(x, {-1.0, 0.0}, g);
  const FlowModel m = FlowModel::from_solution(x, sol, g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-20.0, 20.0), ur(0.05, 6.0);
  const double h = 1e-4;
  int checked = 0;
  while (checked < 200) {
    const double px = ux(rng), pr = ur(rng);
    bool clear = true;
    for (double c : x) clear = clear && std::hypot(px - c, pr) > 1.0 + 2 * h;
    if (!clear) continue;
    // Axisymmetric divergence: du_x/dx + (1/rho) d(rho u_rho)/drho.
    const double dux = (flow_velocity(m, px + h, pr).ux - flow_velocity(m, px - h, pr).ux) / (2 * h);
    const double drr = ((pr + h) * flow_velocity(m, px, pr + h).urho -
                        (pr - h) * flow_velocity(m, px, pr - h).urho) / (2 * h * pr);
    CHECK(std::abs(dux + drr) <= 1e-6 * g.S / g.R);
    ++checked;
  }
}
