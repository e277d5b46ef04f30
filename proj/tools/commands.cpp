#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include <fmt/format.h>

#include "parallel.hpp"
#include "trisphere/experiments.hpp"
#include "trisphere/hydro.hpp"
#include "trisphere/io.hpp"
#include "trisphere/surrogate.hpp"

namespace trisphere::cli {

namespace fs = std::filesystem;

std::string Context::path(const std::string& name) const {
  return (fs::path(out_dir) / name).string();
}

std::string pe_tag(double pe) { return fmt::format("pe{}", pe); }

namespace {

ArtifactHeader header_for(const Context& ctx, const std::string& kind) {
  return {kind, config_hash(ctx.cfg)};
}

template <typename Writer>
void emit(const Context& ctx, const std::string& name, Writer write) {
  std::ostringstream os;
  write(os);
  write_text_file(ctx.path(name), os.str());
  fmt::print(stderr, "wrote {}\n", ctx.path(name));
}

std::string input_dir(const Context& ctx, const std::string& configured) {
  return configured.empty() ? ctx.out_dir : configured;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_validate(const Context& ctx) {
  const auto& v = ctx.cfg.validate;
  const SwimmerGeometry geo = ctx.cfg.geometry.geometry();
  std::vector<ValidationRow> rows;

  // Reciprocal pairs: an action followed by the same action returns the arms.
  for (int sl = 1; sl <= kNumStates; ++sl) {
    for (int al = 1; al <= kNumActions; ++al) {
      const Action a = action_from_label(al);
      const double dX = sequence_displacement(AgentState::from_label(sl), {a, a}, geo,
                                              ctx.cfg.transport.hydro_substeps);
      rows.push_back({"scallop_pair", 10.0 * sl + al, dX, 0.0, std::abs(dX) / geo.R,
                      v.scallop_tolerance, std::abs(dX) < v.scallop_tolerance * geo.R});
    }
  }

  // Gait displacement: positive, speed independent, monotone in the stroke.
  const double dX_gait = gait_displacement(geo, ctx.cfg.transport.hydro_substeps);
  rows.push_back({"gait_displacement", geo.w / geo.R, dX_gait, 0.0, 0.0, 0.0, dX_gait > 0.0});
  {
    SwimmerGeometry fast = geo;
    fast.S = 3.7 * geo.S;
    const double dX_fast = gait_displacement(fast, ctx.cfg.transport.hydro_substeps);
    const double rel = std::abs(dX_fast - dX_gait) / std::abs(dX_gait);
    rows.push_back({"speed_invariance", fast.S, dX_fast, dX_gait, rel, 1e-12, rel <= 1e-12});
  }
  double previous = -HUGE_VAL;
  for (double wR : v.stroke_wR) {
    const double dX = gait_displacement(ctx.cfg.geometry.with_stroke(wR),
                                        ctx.cfg.transport.hydro_substeps);
    rows.push_back({"stroke_monotone", wR, dX, previous == -HUGE_VAL ? 0.0 : previous, 0.0,
                    0.0, dX > previous});
    previous = dX;
  }

  // Observed order of the substep ladder.
  std::vector<double> ladder;
  for (int n : v.substeps) ladder.push_back(gait_displacement(geo, n));
  for (std::size_t k = 0; k + 2 < ladder.size(); ++k) {
    const double p = std::log2((ladder[k] - ladder[k + 1]) / (ladder[k + 1] - ladder[k + 2]));
    rows.push_back({"substep_order", static_cast<double>(v.substeps[k]), p, 2.0,
                    std::abs(p - 2.0), 0.1, std::abs(p - 2.0) <= 0.1});
  }

  // Towed sphere against Clift's correlation.
  const auto towed = parallel_map(v.towed_pe.size(), ctx.jobs, [&](std::size_t i) {
    return towed_sphere_sherwood(geo, v.towed_pe[i], ctx.cfg.transport.grid,
                                 v.towed_core_half_x, v.towed_t_max);
  });
  for (const auto& t : towed) {
    const double ref = clift_sherwood(t.pe);
    const double rel = std::abs(t.sherwood - ref) / ref;
    const double tol = t.pe == 0.0 ? v.towed_zero_tolerance : v.towed_tolerance;
    rows.push_back({"towed_sherwood", t.pe, t.sherwood, ref, rel, tol, t.converged && rel <= tol});
  }

  emit(ctx, "validation.csv", [&](std::ostream& os) {
    write_validation(os, header_for(ctx, "validation"), rows);
  });
  bool all = true;
  for (const auto& r : rows) {
    fmt::print("{:<18} {:>8} value={:<12.6g} ref={:<12.6g} err={:<10.3g} {}\n", r.test,
               fmt::format("{:g}", r.parameter), r.value, r.reference, r.error,
               r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }
  fmt::print("validate: {}\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_sherwood(const Context& ctx) {
  const auto& s = ctx.cfg.sherwood;
  struct Item {
    double wR, pe;
  };
  std::vector<Item> items;
  for (double wR : s.wR) {
    for (double pe : s.pe) items.push_back({wR, pe});
  }
  const auto runs = parallel_map(items.size(), ctx.jobs, [&](std::size_t i) {
    const auto geo = ctx.cfg.geometry.with_stroke(items[i].wR);
    fmt::print(stderr, "sherwood: w/R={} Pe={}\n", items[i].wR, items[i].pe);
    const GaitRun run = run_gait(geo, items[i].pe, ctx.cfg.transport.base(), s.horizon,
                                 ctx.cfg.transport.coupled());
    return PeriodRow{items[i].pe, items[i].wR, run.J0, run.average.mean, run.sherwood(),
                     run.average.periodic};
  });
  emit(ctx, "sherwood.csv", [&](std::ostream& os) {
    write_period_average(os, header_for(ctx, "sherwood"), runs);
  });
  for (const auto& r : runs) {
    fmt::print("w/R={:<4g} Pe={:<6g} J0={:<12.6g} Jbar={:<12.6g} Sh={:.5f}{}\n", r.wR, r.pe,
               r.J0, r.Jbar, r.Sh, r.periodic ? "" : "  (not periodic)");
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_transient(const Context& ctx) {
  const auto& tr = ctx.cfg.transient;
  const SwimmerGeometry geo = ctx.cfg.geometry.geometry();
  const auto runs = parallel_map(tr.pe.size(), ctx.jobs, [&](std::size_t i) {
    fmt::print(stderr, "transient: Pe={}\n", tr.pe[i]);
    return run_gait(geo, tr.pe[i], ctx.cfg.transport.base(), tr.horizon,
                    ctx.cfg.transport.coupled());
  });
  std::vector<PeriodRow> summary;
  for (const auto& run : runs) {
    emit(ctx, fmt::format("transient_{}.csv", pe_tag(run.pe)), [&](std::ostream& os) {
      write_flux_history(os, header_for(ctx, "flux_history"), run.records);
    });
    summary.push_back({run.pe, geo.w / geo.R, run.J0, run.average.mean, run.sherwood(),
                       run.average.periodic});
    fmt::print("Pe={:<6g} J0={:<12.6g} Jbar/J0={:.5f} periodic={}", run.pe, run.J0,
               run.sherwood(), run.average.periodic ? 1 : 0);
    if (run.average.development_time) {
      fmt::print(" development_time={:g}", *run.average.development_time);
    }
    fmt::print("\n");
  }
  emit(ctx, "transient_summary.csv", [&](std::ostream& os) {
    write_period_average(os, header_for(ctx, "period_average"), summary);
  });
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_generate(const Context& ctx) {
  const auto& gen = ctx.cfg.generate;
  const SwimmerGeometry geo = ctx.cfg.geometry.geometry();
  const auto logs = parallel_map(gen.pe.size(), ctx.jobs, [&](std::size_t i) {
    fmt::print(stderr, "generate: Pe={} n={}\n", gen.pe[i], gen.n_actions[i]);
    return generate_experiences(geo, gen.pe[i], gen.gradient, ctx.cfg.transport.base(),
                                gen.n_actions[i], AgentState::from_label(gen.s0),
                                ctx.cfg.seed + i, ctx.cfg.transport.coupled());
  });
  for (std::size_t i = 0; i < logs.size(); ++i) {
    emit(ctx, fmt::format("experiences_{}.csv", pe_tag(gen.pe[i])), [&](std::ostream& os) {
      write_experience_log(os, header_for(ctx, "experience_log"), logs[i]);
    });
  }
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

struct LearnOutput {
  std::vector<std::pair<RewardChannel, SweepResult>> maps;
};

LearnOutput learn_channels(std::span<const Experience> log, std::size_t n_batches,
                           const LearnBlock& lb, unsigned jobs) {
  const auto batches = make_batches(log.size(), lb.batch_size, n_batches);
  const auto results = parallel_map(kAllChannels.size(), jobs, [&](std::size_t c) {
    return sweep(log, batches, lb.gammas, lb.alphas, kAllChannels[c], lb.tie_epsilon);
  });
  LearnOutput out;
  for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
    out.maps.emplace_back(kAllChannels[c], results[c]);
  }
  return out;
}

void append_box_rows(std::vector<BoxRow>& rows, double pe, const LearnOutput& lo) {
  for (const auto& [ch, res] : lo.maps) {
    for (std::size_t b = 0; b < res.batch_total.size(); ++b) {
      rows.push_back({ch, pe, b, res.batch_total[b]});
    }
  }
}

void print_maps(double pe, const LearnOutput& lo) {
  for (const auto& [ch, res] : lo.maps) {
    fmt::print("Pe={:<6g} {} grid success {:.4f}\n", pe, channel_name(ch), res.grid_mean());
  }
}

std::vector<std::pair<RewardChannel, SweepResult>> mirror_maps(const LearnOutput& lo) {
  auto maps = lo.maps;
  for (auto& [ch, res] : maps) res.success = res.mirror_success;
  return maps;
}

}  // namespace

int cmd_learn(const Context& ctx) {
  const auto& lb = ctx.cfg.learn;
  const std::string dir = input_dir(ctx, lb.log_dir);
  std::vector<BoxRow> box;
  for (std::size_t i = 0; i < lb.pe.size(); ++i) {
    const auto log = load_experience_log(
        (fs::path(dir) / fmt::format("experiences_{}.csv", pe_tag(lb.pe[i]))).string());
    if (log.size() < lb.batch_size) {
      throw PreconditionError(fmt::format("learn: log for Pe={} has {} rows, batch size {}",
                                          lb.pe[i], log.size(), lb.batch_size));
    }
    const LearnOutput lo = learn_channels(log, lb.n_batches[i], lb, ctx.jobs);
    emit(ctx, fmt::format("heatmap_{}.csv", pe_tag(lb.pe[i])), [&](std::ostream& os) {
      write_heatmap(os, header_for(ctx, "heatmap"), lo.maps);
    });
    emit(ctx, fmt::format("mirror_heatmap_{}.csv", pe_tag(lb.pe[i])), [&](std::ostream& os) {
      write_heatmap(os, header_for(ctx, "mirror_heatmap"), mirror_maps(lo));
    });
    append_box_rows(box, lb.pe[i], lo);
    print_maps(lb.pe[i], lo);
  }
  emit(ctx, "boxplot.csv", [&](std::ostream& os) {
    write_boxplot(os, header_for(ctx, "boxplot"), box);
  });
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_fit_surrogate(const Context& ctx) {
  const auto& sb = ctx.cfg.surrogate;
  const std::string dir = input_dir(ctx, ctx.cfg.learn.log_dir);
  const SwimmerGeometry geo = ctx.cfg.geometry.geometry();
  for (double pe : sb.pe) {
    const std::string name = fmt::format("experiences_{}.csv", pe_tag(pe));
    const auto log = load_experience_log((fs::path(dir) / name).string());
    AffineRewardModel m = fit_affine(log);
    m.meta["pe"] = fmt::format("{}", pe);
    m.meta["source"] = name;
    m.meta["action_duration"] = format_number(geo.action_duration());
    m.meta["gradient"] = format_number(ctx.cfg.generate.gradient);
    emit(ctx, fmt::format("surrogate_{}.txt", pe_tag(pe)), [&](std::ostream& os) {
      os << header_for(ctx, "surrogate_model").line() << '\n';
      write_model(os, m);
    });
    for (RewardChannel ch : kModelChannels) {
      double eta = 0.0, c1 = 0.0;
      for (int sl = 1; sl <= kNumStates; ++sl) {
        for (int al = 1; al <= kNumActions; ++al) {
          eta += m.noise(ch, AgentState::from_label(sl), action_from_label(al)) / 8.0;
          c1 += m.coef1(ch, AgentState::from_label(sl), action_from_label(al)) / 8.0;
        }
      }
      fmt::print("Pe={:<6g} {} mean c1={:<12.6g} mean eta={:.6g}\n", pe, channel_key(ch), c1,
                 eta);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_surrogate_learn(const Context& ctx) {
  const auto& sb = ctx.cfg.surrogate;
  const auto& lb = ctx.cfg.learn;
  const std::string dir = input_dir(ctx, sb.model_dir);
  const SwimmerGeometry geo = ctx.cfg.geometry.geometry();
  const AgentState s0 = AgentState::from_label(ctx.cfg.generate.s0);

  std::vector<BoxRow> box;
  std::ostringstream ladder;
  ladder << header_for(ctx, "noise_ladder").line() << '\n'
         << "reward,pe,eta_factor,grid_success\n";
  for (std::size_t i = 0; i < sb.pe.size(); ++i) {
    const double pe = sb.pe[i];
    const AffineRewardModel model =
        load_model((fs::path(dir) / fmt::format("surrogate_{}.txt", pe_tag(pe))).string());
    const std::uint64_t seed = ctx.cfg.seed + i;
    auto rollout = [&](const AffineRewardModel& m) {
      SurrogateEnvironment env(m, s0, 0.0, seed, geo.action_duration());
      return rollout_random(env, sb.n_actions, seed);
    };
    const auto log = rollout(model);
    emit(ctx, fmt::format("surrogate_experiences_{}.csv", pe_tag(pe)), [&](std::ostream& os) {
      write_experience_log(os, header_for(ctx, "experience_log"), log);
    });
    const LearnOutput lo = learn_channels(log, sb.n_batches, lb, ctx.jobs);
    emit(ctx, fmt::format("surrogate_heatmap_{}.csv", pe_tag(pe)), [&](std::ostream& os) {
      write_heatmap(os, header_for(ctx, "heatmap"), lo.maps);
    });
    append_box_rows(box, pe, lo);
    print_maps(pe, lo);

    for (double factor : sb.eta_ladder) {
      const auto noisy = rollout(scale_noise(model, factor));
      const LearnOutput nl = learn_channels(noisy, sb.n_batches, lb, ctx.jobs);
      for (const auto& [ch, res] : nl.maps) {
        ladder << channel_name(ch) << ',' << format_number(pe) << ','
               << format_number(factor) << ',' << format_number(res.grid_mean()) << '\n';
      }
    }
  }
  emit(ctx, "surrogate_boxplot.csv", [&](std::ostream& os) {
    write_boxplot(os, header_for(ctx, "boxplot"), box);
  });
  write_text_file(ctx.path("surrogate_noise_ladder.csv"), ladder.str());
  fmt::print(stderr, "wrote {}\n", ctx.path("surrogate_noise_ladder.csv"));
  return 0;
}

}  // namespace trisphere::cli
