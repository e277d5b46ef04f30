#include "trisphere/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace trisphere {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ArtifactHeader::line() const {
  return fmt::format("# trisphere artifact={} version={} config={:016x}", kind,
                     kArtifactVersion, config_hash);
}

std::string format_number(double v) {
  // Normalize negative zero so that equal values print identically.
  if (v == 0.0) v = 0.0;
  return fmt::format("{:.17g}", v);
}

namespace {

void begin(std::ostream& os, const ArtifactHeader& h, std::string_view columns) {
  os << h.line() << '\n' << columns << '\n';
}

}  // namespace

void write_flux_history(std::ostream& os, const ArtifactHeader& h,
                        const std::vector<FluxRecord>& records) {
  begin(os, h, "t,s,a,X,J");
  for (const auto& r : records) {
    os << format_number(r.t) << ',' << r.s << ',' << r.a << ','
       << format_number(r.X) << ',' << format_number(r.J) << '\n';
  }
}

void write_period_average(std::ostream& os, const ArtifactHeader& h,
                          const std::vector<PeriodRow>& rows) {
  begin(os, h, "pe,wR,J0,Jbar,Sh,periodic_flag");
  for (const auto& r : rows) {
    os << format_number(r.pe) << ',' << format_number(r.wR) << ','
       << format_number(r.J0) << ',' << format_number(r.Jbar) << ','
       << format_number(r.Sh) << ',' << (r.periodic ? 1 : 0) << '\n';
  }
}

void write_experience_log(std::ostream& os, const ArtifactHeader& h,
                          const std::vector<Experience>& log) {
  begin(os, h, "t,s,a,s_next,r_disp,r_acc,r_diff,X_before,X_after");
  for (const auto& e : log) {
    os << format_number(e.t) << ',' << e.s.label() << ',' << action_label(e.a)
       << ',' << e.s_next.label() << ',' << format_number(e.r_disp) << ','
       << format_number(e.r_acc) << ',' << format_number(e.r_diff) << ','
       << format_number(e.X_before) << ',' << format_number(e.X_after) << '\n';
  }
}

void write_heatmap(std::ostream& os, const ArtifactHeader& h,
                   const std::vector<std::pair<RewardChannel, SweepResult>>& maps) {
  begin(os, h, "reward,gamma,alpha,success_rate,n_batches");
  for (const auto& [ch, res] : maps) {
    for (std::size_t gi = 0; gi < res.gammas.size(); ++gi) {
      for (std::size_t ai = 0; ai < res.alphas.size(); ++ai) {
        os << channel_name(ch) << ',' << format_number(res.gammas[gi]) << ','
           << format_number(res.alphas[ai]) << ','
           << format_number(res.success[gi][ai]) << ',' << res.n_batches << '\n';
      }
    }
  }
}

void write_boxplot(std::ostream& os, const ArtifactHeader& h,
                   const std::vector<BoxRow>& rows) {
  begin(os, h, "reward,pe,batch_index,total_success");
  for (const auto& r : rows) {
    os << channel_name(r.reward) << ',' << format_number(r.pe) << ','
       << r.batch_index << ',' << format_number(r.total_success) << '\n';
  }
}

void write_validation(std::ostream& os, const ArtifactHeader& h,
                      const std::vector<ValidationRow>& rows) {
  begin(os, h, "test,parameter,value,reference,error,tolerance,pass");
  for (const auto& r : rows) {
    os << r.test << ',' << format_number(r.parameter) << ','
       << format_number(r.value) << ',' << format_number(r.reference) << ','
       << format_number(r.error) << ',' << format_number(r.tolerance) << ','
       << (r.pass ? 1 : 0) << '\n';
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_num(std::string_view f, int lineno) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw PreconditionError(
        fmt::format("experience log line {}: bad number '{}'", lineno, f));
  }
  return v;
}

int parse_label(std::string_view f, int lineno, int max) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || v < 1 || v > max) {
    throw PreconditionError(
        fmt::format("experience log line {}: bad label '{}'", lineno, f));
  }
  return v;
}

}  // namespace

std::vector<Experience> read_experience_log(std::istream& is) {
  static constexpr std::string_view kHeader =
      "t,s,a,s_next,r_disp,r_acc,r_diff,X_before,X_after";
  std::vector<Experience> out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != kHeader) {
        throw PreconditionError(fmt::format(
            "experience log line {}: expected header '{}'", lineno, kHeader));
      }
      have_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) {
      throw PreconditionError(fmt::format(
          "experience log line {}: expected 9 fields, found {}", lineno, f.size()));
    }
    Experience e;
    e.t = parse_num(f[0], lineno);
    e.s = AgentState::from_label(parse_label(f[1], lineno, kNumStates));
    e.a = action_from_label(parse_label(f[2], lineno, kNumActions));
    e.s_next = AgentState::from_label(parse_label(f[3], lineno, kNumStates));
    e.r_disp = parse_num(f[4], lineno);
    e.r_acc = parse_num(f[5], lineno);
    e.r_diff = parse_num(f[6], lineno);
    e.X_before = parse_num(f[7], lineno);
    e.X_after = parse_num(f[8], lineno);
    if (!(e.s_next == transition(e.s, e.a))) {
      throw PreconditionError(fmt::format(
          "experience log line {}: s_next is not transition(s, a)", lineno));
    }
    out.push_back(e);
  }
  if (!have_header) throw PreconditionError("experience log: missing header");
  return out;
}

std::vector<Experience> load_experience_log(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open experience log '" + path + "'");
  return read_experience_log(is);
}

void write_text_file(const std::string& path, std::string_view text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace trisphere
