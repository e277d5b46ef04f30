#include <doctest.h>

#include <cmath>
#include <sstream>

#include "trisphere/io.hpp"

using namespace trisphere;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

Experience sample(int t, int s, int a, double X) {
  Experience e;
  e.t = t;
  e.s = AgentState::from_label(s);
  e.a = action_from_label(a);
  e.s_next = transition(e.s, e.a);
  e.r_disp = 0.125 * a;
  e.r_acc = 1.0 / 3.0;
  e.r_diff = -2.5e-17;
  e.X_before = X;
  e.X_after = X + e.r_disp;
  return e;
}

}  // namespace

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("header line carries kind, version and hash") {
  const ArtifactHeader h{"flux", 0xabcULL};
  CHECK(h.line() == "# trisphere artifact=flux version=1 config=0000000000000abc");
}

TEST_CASE("numbers round-trip and negative zero is normalised") {
  for (double v : {1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.1}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("flux history and period table schemas") {
  std::ostringstream os;
  write_flux_history(os, {"flux", 1}, {{0.0, 4, 0, 0.0, 12.5}, {6.0, 2, 1, 0.1, 12.0}});
  auto l = lines_of(os.str());
  REQUIRE(l.size() == 4);
  CHECK(l[0].rfind("# trisphere artifact=flux", 0) == 0);
  CHECK(l[1] == "t,s,a,X,J");
  CHECK(l[2] == "0,4,0,0,12.5");
  CHECK(l[3] == "6,2,1,0.10000000000000001,12");

  std::ostringstream ps;
  write_period_average(ps, {"sherwood", 1}, {{0.6, 6.0, 10.0, 9.0, 0.9, true}});
  l = lines_of(ps.str());
  REQUIRE(l.size() == 3);
  CHECK(l[1] == "pe,wR,J0,Jbar,Sh,periodic_flag");
  CHECK(l[2] == "0.59999999999999998,6,10,9,0.90000000000000002,1");
}

TEST_CASE("validation and boxplot schemas") {
  std::ostringstream os;
  write_validation(os, {"validation", 0}, {{"towed", 1.0, 1.2, 1.25, -0.04, 0.1, true}});
  auto l = lines_of(os.str());
  REQUIRE(l.size() == 3);
  CHECK(l[1] == "test,parameter,value,reference,error,tolerance,pass");
  CHECK(l[2].rfind("towed,1,1.2", 0) == 0);
  CHECK(l[2].back() == '1');

  std::ostringstream bs;
  write_boxplot(bs, {"boxplot", 0}, {{RewardChannel::increase, 0.06, 3, 0.5}});
  l = lines_of(bs.str());
  REQUIRE(l.size() == 3);
  CHECK(l[1] == "reward,pe,batch_index,total_success");
  CHECK(l[2] == "R3,0.059999999999999998,3,0.5");
}

TEST_CASE("heatmap rows are gamma-major per channel") {
  SweepResult r;
  r.gammas = {0.5, 0.9};
  r.alphas = {0.1, 0.2, 0.4};
  r.success = {{0.0, 0.1, 0.2}, {0.3, 0.4, 1.0}};
  r.n_batches = 10;
  std::ostringstream os;
  write_heatmap(os, {"heatmap", 0}, {{RewardChannel::displacement, r}, {RewardChannel::increase, r}});
  const auto l = lines_of(os.str());
  REQUIRE(l.size() == 2 + 12);
  CHECK(l[1] == "reward,gamma,alpha,success_rate,n_batches");
  CHECK(l[2] == "R1,0.5,0.10000000000000001,0,10");
  CHECK(l[7] == "R1,0.90000000000000002,0.40000000000000002,1,10");
  CHECK(l[8].rfind("R3,0.5,", 0) == 0);
}

TEST_CASE("experience logs round-trip bit for bit") {
  std::vector<Experience> log;
  double X = -0.3;
  int s = 4;
  for (int t = 0; t < 40; ++t) {
    const int a = 1 + (t * 7 % 3 == 0);
    log.push_back(sample(t, s, a, X));
    s = log.back().s_next.label();
    X = log.back().X_after;
  }
  std::stringstream ss;
  write_experience_log(ss, {"experiences", 9}, log);
  const auto back = read_experience_log(ss);
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back[i].t == log[i].t);
    CHECK(back[i].s == log[i].s);
    CHECK(back[i].a == log[i].a);
    CHECK(back[i].s_next == log[i].s_next);
    CHECK(back[i].r_disp == log[i].r_disp);
    CHECK(back[i].r_acc == log[i].r_acc);
    CHECK(back[i].r_diff == log[i].r_diff);
    CHECK(back[i].X_before == log[i].X_before);
    CHECK(back[i].X_after == log[i].X_after);
  }
}

TEST_CASE("malformed experience logs are rejected") {
  const std::string head = "t,s,a,s_next,r_disp,r_acc,r_diff,X_before,X_after\n";
  const auto bad = [&](const std::string& body) {
    std::istringstream is(head + body);
    return is;
  };
  {
    auto is = bad("0,4,1,2,0.1,0,0,0,0.1\n");
    CHECK(read_experience_log(is).size() == 1);
  }
  {
    auto is = bad("0,4,1,3,0.1,0,0,0,0.1\n");  // wrong successor
    CHECK_THROWS_AS(read_experience_log(is), PreconditionError);
  }
  {
    auto is = bad("0,4,1,2,0.1,0,0,0\n");  // missing column
    CHECK_THROWS_AS(read_experience_log(is), PreconditionError);
  }
  {
    auto is = bad("0,5,1,2,0.1,0,0,0,0.1\n");  // state out of range
    CHECK_THROWS_AS(read_experience_log(is), PreconditionError);
  }
  {
    auto is = bad("0,4,1,2,abc,0,0,0,0.1\n");  // not a number
    CHECK_THROWS_AS(read_experience_log(is), PreconditionError);
  }
  {
    std::istringstream is("t,s,a\n0,4,1\n");  // wrong header
    CHECK_THROWS_AS(read_experience_log(is), PreconditionError);
  }
}
