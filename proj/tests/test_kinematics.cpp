#include <doctest.h>

#include <cmath>

#include "trisphere/kinematics.hpp"

using namespace trisphere;

namespace {

AgentState st(int label) { return AgentState::from_label(label); }

}  // namespace

TEST_CASE("geometry validation rejects overlapping or degenerate swimmers") {
  SwimmerGeometry g;
  CHECK_NOTHROW(g.validate());
  g.w = 8.0;  // contracted arm 2R: spheres touch
  CHECK_THROWS_AS(g.validate(), PreconditionError);
  g = {};
  g.w = 0.0;
  CHECK_THROWS_AS(g.validate(), PreconditionError);
  g = {};
  g.R = -1.0;
  CHECK_THROWS_AS(g.validate(), PreconditionError);
  g = {};
  g.S = NAN;
  CHECK_THROWS_AS(g.validate(), PreconditionError);
  g = {};
  CHECK(g.gait_period() == doctest::Approx(24.0));
}

TEST_CASE("state labels round-trip with the arm pairs") {
  for (int label = 1; label <= kNumStates; ++label) {
    CHECK(st(label).label() == label);
  }
  CHECK(st(1).arm1() == Arm::contracted);
  CHECK(st(1).arm2() == Arm::contracted);
  CHECK(st(2).arm1() == Arm::contracted);
  CHECK(st(2).arm2() == Arm::extended);
  CHECK(st(3).arm1() == Arm::extended);
  CHECK(st(3).arm2() == Arm::contracted);
  CHECK(st(4).arm1() == Arm::extended);
  CHECK(st(4).arm2() == Arm::extended);
  CHECK_THROWS_AS(AgentState::from_label(0), PreconditionError);
  CHECK_THROWS_AS(AgentState::from_label(5), PreconditionError);
  CHECK_THROWS_AS(action_from_label(3), PreconditionError);
}

TEST_CASE("sphere positions follow the posture") {
  const double R = 1.0;
  auto p = sphere_positions(0.0, 10 * R, 10 * R);
  CHECK(p[0] == doctest::Approx(-10.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(10.0));
  p = sphere_positions(0.0, 4 * R, 10 * R);
  CHECK(p[0] == doctest::Approx(-6.0));
  CHECK(p[1] == doctest::Approx(-2.0));
  CHECK(p[2] == doctest::Approx(8.0));
  p = sphere_positions(5 * R, 10 * R, 4 * R);
  CHECK(p[0] == doctest::Approx(-3.0));
  CHECK(p[1] == doctest::Approx(7.0));
  CHECK(p[2] == doctest::Approx(11.0));
  CHECK_THROWS_AS(sphere_positions(NAN, 10.0, 10.0), PreconditionError);
}

TEST_CASE("sphere positions: centroid and gaps are exact for arbitrary postures") {
  for (double X : {-3.7, 0.0, 12.25}) {
    for (double L1 : {4.0, 7.3, 10.0}) {
      for (double L2 : {4.0, 5.9, 10.0}) {
        const auto p = sphere_positions(X, L1, L2);
        CHECK((p[0] + p[1] + p[2]) / 3.0 == doctest::Approx(X).epsilon(1e-14));
        CHECK(p[1] - p[0] == doctest::Approx(L1).epsilon(1e-14));
        CHECK(p[2] - p[1] == doctest::Approx(L2).epsilon(1e-14));
        CHECK(p[0] < p[1]);
        CHECK(p[1] < p[2]);
      }
    }
  }
}

TEST_CASE("transition toggles the moved arm") {
  CHECK(transition(st(1), Action::move_arm1).label() == 3);
  CHECK(transition(st(4), Action::move_arm1).label() == 2);
  CHECK(transition(st(2), Action::move_arm2).label() == 1);
  for (int s = 1; s <= kNumStates; ++s) {
    for (Action a : {Action::move_arm1, Action::move_arm2}) {
      CHECK(transition(transition(st(s), a), a) == st(s));
    }
  }
}

TEST_CASE("gait action is the right-swimming policy") {
  CHECK(gait_action(st(1)) == Action::move_arm1);
  CHECK(gait_action(st(4)) == Action::move_arm1);
  CHECK(gait_action(st(2)) == Action::move_arm2);
  CHECK(gait_action(st(3)) == Action::move_arm2);
  // From state 4 the gait visits 4 -> 2 -> 1 -> 3 -> 4.
  AgentState s = st(4);
  std::vector<int> visited;
  for (int k = 0; k < 4; ++k) {
    s = transition(s, gait_action(s));
    visited.push_back(s.label());
  }
  CHECK(visited == std::vector<int>{2, 1, 3, 4});
}

TEST_CASE("arm trajectory ramps linearly at speed S") {
  SwimmerGeometry g;
  auto tr = arm_trajectory(st(4), Action::move_arm1, g, 2);
  REQUIRE(tr.size() == 3);
  CHECK(tr[0].L1 == doctest::Approx(10.0));
  CHECK(tr[1].L1 == doctest::Approx(7.0));
  CHECK(tr[2].L1 == doctest::Approx(4.0));
  for (const auto& s : tr) {
    CHECK(s.dL1 == doctest::Approx(-1.0));
    CHECK(s.dL2 == 0.0);
    CHECK(s.L2 == doctest::Approx(10.0));
  }
  CHECK(tr[2].t == doctest::Approx(6.0));

  tr = arm_trajectory(st(1), Action::move_arm2, g, 1);
  REQUIRE(tr.size() == 2);
  CHECK(tr[0].L2 == doctest::Approx(4.0));
  CHECK(tr[1].L2 == doctest::Approx(10.0));
  CHECK(tr[0].dL2 == doctest::Approx(1.0));

  const auto r = arm_rates(st(3), Action::move_arm1, g);
  CHECK(r[0] == doctest::Approx(-1.0));
  CHECK(r[1] == 0.0);
}

TEST_CASE("postures match their states") {
  SwimmerGeometry g;
  for (int s = 1; s <= kNumStates; ++s) {
    const Posture p = posture_for(st(s), g, 2.5);
    CHECK(p.X == 2.5);
    CHECK(posture_matches(p, st(s), g));
    for (int o = 1; o <= kNumStates; ++o) {
      if (o != s) CHECK_FALSE(posture_matches(p, st(o), g));
    }
  }
}
