// trisphere: experiment driver for the three-sphere swimmer.
//
//   trisphere <command> [--config PATH] [--out DIR] [--fast] [--seed N] [--jobs N]
//
// Exit codes: 0 success, 1 tolerance failure or runtime error, 2 config error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <functional>
#include <map>
#include <optional>

#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace trisphere::cli;

  CLI::App app{"Three-sphere swimmer: hydrodynamics, solute uptake and Q-learning"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool fast = false;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;

  const std::map<std::string, std::pair<std::string, std::function<int(const Context&)>>> commands{
      {"validate", {"gait displacement checks and towed-sphere Sherwood numbers", cmd_validate}},
      {"sherwood", {"period-averaged flux of the swimming gait over (Pe, w/R)", cmd_sherwood}},
      {"transient", {"flux histories J(t) of the swimming gait", cmd_transient}},
      {"generate", {"random-policy experience logs in a linear gradient", cmd_generate}},
      {"learn", {"Q-learning sweeps over recorded experience logs", cmd_learn}},
      {"fit-surrogate", {"fit affine reward models to experience logs", cmd_fit_surrogate}},
      {"surrogate-learn", {"Q-learning sweeps on surrogate rollouts", cmd_surrogate_learn}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_flag("--fast", fast, "coarse grid and short horizons");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Context ctx;
  try {
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    if (fast || ctx.cfg.fast) {
      ctx.cfg.fast = false;
      ctx.cfg.apply_fast();
    }
    if (seed) ctx.cfg.seed = *seed;
    ctx.cfg.check();
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  }
  ctx.out_dir = out_dir;
  ctx.jobs = jobs;

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return commands.at(name).second(ctx);
  } catch (const trisphere::PreconditionError& e) {
    fmt::print(stderr, "{}: invalid input: {}\n", name, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "{}: {}\n", name, e.what());
    return kExitTolerance;
  }
}
