#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "trisphere/coupled.hpp"
#include "trisphere/kinematics.hpp"
#include "trisphere/transport.hpp"

namespace trisphere::cli {

/// Raised for malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeometryBlock {
  double R = 1.0;
  double W_over_R = 10.0;
  double w_over_R = 6.0;
  double S = 1.0;
  double mu = 1.0;

  SwimmerGeometry geometry() const;
  SwimmerGeometry with_stroke(double wR) const;
};

struct TransportBlock {
  GridSpec grid;
  double dt_max = 0.0;
  double lambda = 0.0;
  double cfl = 0.5;
  double mask_cfl = 1.0;
  double min_link_fraction = 0.1;
  FarField far_field = FarField::dirichlet;
  int hydro_substeps = 200;

  /// Transport settings except D and the background.
  TransportConfig base() const;
  CoupledOptions coupled() const { return {hydro_substeps}; }
};

struct ValidateBlock {
  std::vector<double> towed_pe{0.0, 0.01, 0.1, 1.0, 10.0, 100.0};
  double towed_tolerance = 0.10;
  double towed_zero_tolerance = 0.02;
  double towed_core_half_x = 3.0;
  double towed_t_max = 150.0;
  /// Hydrodynamic substep ladder for the gait convergence check.
  std::vector<int> substeps{25, 50, 100, 200, 400};
  std::vector<double> stroke_wR{2.0, 4.0, 6.0};
  double scallop_tolerance = 1e-10;
};

struct SherwoodBlock {
  std::vector<double> pe{0.06, 0.6, 6.0, 60.0};
  std::vector<double> wR{2.0, 4.0, 6.0};
  double horizon = 500.0;
};

struct TransientBlock {
  std::vector<double> pe{0.6, 6.0, 60.0};
  double horizon = 500.0;
};

struct GenerateBlock {
  std::vector<double> pe{0.06, 0.6, 6.0};
  std::vector<std::size_t> n_actions{6000, 1000, 1000};
  double gradient = 0.01;
  int s0 = 4;
};

struct LearnBlock {
  /// Directory holding experiences_pe<Pe>.csv; empty means --out.
  std::string log_dir;
  std::vector<double> pe{0.06, 0.6, 6.0};
  std::vector<std::size_t> n_batches{12, 10, 10};
  std::size_t batch_size = 500;
  std::vector<double> gammas{0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99};
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
  double tie_epsilon = 1e-12;
};

struct SurrogateBlock {
  /// Directory holding surrogate_pe<Pe>.txt; empty means --out.
  std::string model_dir;
  std::vector<double> pe{0.06, 0.6, 6.0};
  std::size_t n_actions = 6000;
  std::size_t n_batches = 12;
  /// Multipliers of the fitted noise amplitude for the noise ladder.
  std::vector<double> eta_ladder{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
};

struct RunConfig {
  GeometryBlock geometry;
  TransportBlock transport;
  ValidateBlock validate;
  SherwoodBlock sherwood;
  TransientBlock transient;
  GenerateBlock generate;
  LearnBlock learn;
  SurrogateBlock surrogate;
  std::uint64_t seed = 20240601;
  bool fast = false;

  /// Applies the --fast profile: core spacing doubled, horizons halved.
  void apply_fast();
  /// Checks every block against module preconditions; throws ConfigError.
  void check() const;
};

/// Parses a JSON document; unknown keys and wrong types are ConfigErrors.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// The effective configuration, all fields included, keys sorted.
nlohmann::json to_json(const RunConfig& cfg);
/// FNV-1a of the canonical dump of to_json(cfg).
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace trisphere::cli
