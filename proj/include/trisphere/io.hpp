#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trisphere/coupled.hpp"
#include "trisphere/rl.hpp"

namespace trisphere {

inline constexpr int kArtifactVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// First line of every emitted file:
///   # trisphere artifact=<kind> version=<N> config=<16 hex digits>
struct ArtifactHeader {
  std::string kind;
  std::uint64_t config_hash = 0;

  std::string line() const;
};

/// Shortest text that is fixed by the value: 17 significant digits.
std::string format_number(double v);

struct PeriodRow {
  double pe = 0.0;
  double wR = 0.0;
  double J0 = 0.0;
  double Jbar = 0.0;
  double Sh = 0.0;
  bool periodic = false;
};

struct BoxRow {
  RewardChannel reward = RewardChannel::displacement;
  double pe = 0.0;
  std::size_t batch_index = 0;
  double total_success = 0.0;
};

struct ValidationRow {
  std::string test;
  double parameter = 0.0;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// t,s,a,X,J
void write_flux_history(std::ostream& os, const ArtifactHeader& h,
                        const std::vector<FluxRecord>& records);
/// pe,wR,J0,Jbar,Sh,periodic_flag
void write_period_average(std::ostream& os, const ArtifactHeader& h,
                          const std::vector<PeriodRow>& rows);
/// t,s,a,s_next,r_disp,r_acc,r_diff,X_before,X_after
void write_experience_log(std::ostream& os, const ArtifactHeader& h,
                          const std::vector<Experience>& log);
/// reward,gamma,alpha,success_rate,n_batches; one block per channel in
/// argument order, gamma-major within a block.
void write_heatmap(std::ostream& os, const ArtifactHeader& h,
                   const std::vector<std::pair<RewardChannel, SweepResult>>& maps);
/// reward,pe,batch_index,total_success
void write_boxplot(std::ostream& os, const ArtifactHeader& h,
                   const std::vector<BoxRow>& rows);
/// test,parameter,value,reference,error,tolerance,pass
void write_validation(std::ostream& os, const ArtifactHeader& h,
                      const std::vector<ValidationRow>& rows);

/// Reads an experience log, skipping '#' lines. Checks the header, the
/// column count, number syntax, label ranges and s_next == transition(s, a).
/// Throws PreconditionError naming the offending line.
std::vector<Experience> read_experience_log(std::istream& is);
std::vector<Experience> load_experience_log(const std::string& path);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, std::string_view text);

}  // namespace trisphere
