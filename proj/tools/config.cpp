#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "trisphere/io.hpp"

namespace trisphere::cli {

using nlohmann::json;

SwimmerGeometry GeometryBlock::geometry() const {
  SwimmerGeometry g;
  g.R = R;
  g.W = W_over_R * R;
  g.w = w_over_R * R;
  g.S = S;
  g.mu = mu;
  return g;
}

SwimmerGeometry GeometryBlock::with_stroke(double wR) const {
  SwimmerGeometry g = geometry();
  g.w = wR * R;
  return g;
}

TransportConfig TransportBlock::base() const {
  TransportConfig c;
  c.grid = grid;
  c.dt_max = dt_max;
  c.lambda = lambda;
  c.cfl = cfl;
  c.mask_cfl = mask_cfl;
  c.min_link_fraction = min_link_fraction;
  c.far_field = far_field;
  return c;
}

namespace {

/// Reads the members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      check_type(*it, out, key);
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}.{}: {}", where(), key, e.what()));
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) throw ConfigError(fmt::format("{}: unknown key '{}'", where(), k));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  template <typename T>
  void check_type(const json& v, const T&, const char* key) const {
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer() && (std::is_signed_v<T> || v.get<long long>() >= 0);
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      ok = v.is_string();
    } else {
      ok = v.is_array();
      if (ok) {
        for (const auto& e : v) check_type(e, typename T::value_type{}, key);
      }
    }
    if (!ok) throw ConfigError(fmt::format("{}.{}: wrong type", where(), key));
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

FarField far_field_from(const std::string& s) {
  if (s == "dirichlet") return FarField::dirichlet;
  if (s == "monopole") return FarField::monopole;
  throw ConfigError("transport.far_field: expected 'dirichlet' or 'monopole'");
}

std::string far_field_name(FarField f) {
  return f == FarField::monopole ? "monopole" : "dirichlet";
}

void require_positive_list(const std::vector<double>& v, const char* what,
                           bool allow_zero = false) {
  if (v.empty()) throw ConfigError(fmt::format("{}: empty list", what));
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0)) {
      throw ConfigError(fmt::format("{}: values must be finite and {}", what,
                                    allow_zero ? ">= 0" : "> 0"));
    }
  }
}

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  ObjectReader top(doc, "");
  top.get("seed", cfg.seed);
  top.get("fast", cfg.fast);

  if (const json* j = top.child("geometry")) {
    ObjectReader r(*j, "geometry");
    auto& b = cfg.geometry;
    r.get("R", b.R);
    r.get("W_over_R", b.W_over_R);
    r.get("w_over_R", b.w_over_R);
    r.get("S", b.S);
    r.get("mu", b.mu);
    r.finish();
  }
  if (const json* j = top.child("transport")) {
    ObjectReader r(*j, "transport");
    auto& b = cfg.transport;
    if (const json* gj = r.child("grid")) {
      ObjectReader gr(*gj, "transport.grid");
      gr.get("h", b.grid.h);
      gr.get("core_half_x", b.grid.core_half_x);
      gr.get("outer_half_x", b.grid.outer_half_x);
      gr.get("core_rho", b.grid.core_rho);
      gr.get("outer_rho", b.grid.outer_rho);
      gr.get("stretch", b.grid.stretch);
      gr.finish();
    }
    r.get("dt_max", b.dt_max);
    r.get("lambda", b.lambda);
    r.get("cfl", b.cfl);
    r.get("mask_cfl", b.mask_cfl);
    r.get("min_link_fraction", b.min_link_fraction);
    std::string ff = far_field_name(b.far_field);
    r.get("far_field", ff);
    b.far_field = far_field_from(ff);
    r.get("hydro_substeps", b.hydro_substeps);
    r.finish();
  }
  if (const json* j = top.child("validate")) {
    ObjectReader r(*j, "validate");
    auto& b = cfg.validate;
    r.get("towed_pe", b.towed_pe);
    r.get("towed_tolerance", b.towed_tolerance);
    r.get("towed_zero_tolerance", b.towed_zero_tolerance);
    r.get("towed_core_half_x", b.towed_core_half_x);
    r.get("towed_t_max", b.towed_t_max);
    r.get("substeps", b.substeps);
    r.get("stroke_wR", b.stroke_wR);
    r.get("scallop_tolerance", b.scallop_tolerance);
    r.finish();
  }
  if (const json* j = top.child("sherwood")) {
    ObjectReader r(*j, "sherwood");
    r.get("pe", cfg.sherwood.pe);
    r.get("wR", cfg.sherwood.wR);
    r.get("horizon", cfg.sherwood.horizon);
    r.finish();
  }
  if (const json* j = top.child("transient")) {
    ObjectReader r(*j, "transient");
    r.get("pe", cfg.transient.pe);
    r.get("horizon", cfg.transient.horizon);
    r.finish();
  }
  if (const json* j = top.child("generate")) {
    ObjectReader r(*j, "generate");
    r.get("pe", cfg.generate.pe);
    r.get("n_actions", cfg.generate.n_actions);
    r.get("gradient", cfg.generate.gradient);
    r.get("s0", cfg.generate.s0);
    r.finish();
  }
  if (const json* j = top.child("learn")) {
    ObjectReader r(*j, "learn");
    auto& b = cfg.learn;
    r.get("log_dir", b.log_dir);
    r.get("pe", b.pe);
    r.get("n_batches", b.n_batches);
    r.get("batch_size", b.batch_size);
    r.get("gammas", b.gammas);
    r.get("alphas", b.alphas);
    r.get("tie_epsilon", b.tie_epsilon);
    r.finish();
  }
  if (const json* j = top.child("surrogate")) {
    ObjectReader r(*j, "surrogate");
    auto& b = cfg.surrogate;
    r.get("model_dir", b.model_dir);
    r.get("pe", b.pe);
    r.get("n_actions", b.n_actions);
    r.get("n_batches", b.n_batches);
    r.get("eta_ladder", b.eta_ladder);
    r.finish();
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return parse_config(doc);
}

void RunConfig::apply_fast() {
  fast = true;
  transport.grid = transport.grid.coarsened(2.0);
  sherwood.horizon *= 0.5;
  transient.horizon *= 0.5;
}

void RunConfig::check() const {
  try {
    geometry.geometry().validate();
    for (double wR : validate.stroke_wR) geometry.with_stroke(wR).validate();
    for (double wR : sherwood.wR) geometry.with_stroke(wR).validate();
    TransportConfig t = transport.base();
    t.validate();
    t.grid.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (transport.hydro_substeps < 1) throw ConfigError("transport.hydro_substeps must be >= 1");

  require_positive_list(validate.towed_pe, "validate.towed_pe", true);
  if (!(validate.towed_tolerance > 0.0 && validate.towed_zero_tolerance > 0.0)) {
    throw ConfigError("validate: tolerances must be positive");
  }
  if (!(validate.towed_core_half_x >= 2.0 && validate.towed_t_max > 0.0)) {
    throw ConfigError("validate: towed_core_half_x must be >= 2 and towed_t_max > 0");
  }
  if (validate.substeps.size() < 3) {
    throw ConfigError("validate.substeps: need at least three levels");
  }
  for (std::size_t k = 0; k < validate.substeps.size(); ++k) {
    if (validate.substeps[k] < 1 || (k > 0 && validate.substeps[k] != 2 * validate.substeps[k - 1])) {
      throw ConfigError("validate.substeps: must be positive and doubling");
    }
  }
  require_positive_list(validate.stroke_wR, "validate.stroke_wR");

  require_positive_list(sherwood.pe, "sherwood.pe");
  require_positive_list(sherwood.wR, "sherwood.wR");
  if (!(sherwood.horizon > 0.0)) throw ConfigError("sherwood.horizon must be positive");
  require_positive_list(transient.pe, "transient.pe");
  if (!(transient.horizon > 0.0)) throw ConfigError("transient.horizon must be positive");

  require_positive_list(generate.pe, "generate.pe");
  if (generate.n_actions.size() != generate.pe.size()) {
    throw ConfigError("generate.n_actions: one entry per Pe required");
  }
  for (auto n : generate.n_actions) {
    if (n == 0) throw ConfigError("generate.n_actions: must be positive");
  }
  if (!(generate.gradient > 0.0 && std::isfinite(generate.gradient))) {
    throw ConfigError("generate.gradient must be positive");
  }
  if (generate.s0 < 1 || generate.s0 > kNumStates) throw ConfigError("generate.s0 must be 1..4");

  require_positive_list(learn.pe, "learn.pe");
  if (learn.n_batches.size() != learn.pe.size()) {
    throw ConfigError("learn.n_batches: one entry per Pe required");
  }
  for (auto n : learn.n_batches) {
    if (n == 0) throw ConfigError("learn.n_batches: must be positive");
  }
  if (learn.batch_size == 0) throw ConfigError("learn.batch_size must be positive");
  require_positive_list(learn.gammas, "learn.gammas");
  require_positive_list(learn.alphas, "learn.alphas");
  for (double g : learn.gammas) {
    if (!(g < 1.0)) throw ConfigError("learn.gammas: values must lie in (0, 1)");
  }
  for (double a : learn.alphas) {
    if (!(a <= 1.0)) throw ConfigError("learn.alphas: values must lie in (0, 1]");
  }
  if (!(learn.tie_epsilon >= 0.0)) throw ConfigError("learn.tie_epsilon must be >= 0");

  require_positive_list(surrogate.pe, "surrogate.pe");
  if (surrogate.n_batches == 0 || surrogate.n_actions < learn.batch_size) {
    throw ConfigError("surrogate: need n_batches > 0 and n_actions >= learn.batch_size");
  }
  require_positive_list(surrogate.eta_ladder, "surrogate.eta_ladder", true);
  for (std::size_t k = 1; k < surrogate.eta_ladder.size(); ++k) {
    if (!(surrogate.eta_ladder[k] > surrogate.eta_ladder[k - 1])) {
      throw ConfigError("surrogate.eta_ladder: must be increasing");
    }
  }
}

json to_json(const RunConfig& c) {
  const auto& g = c.transport.grid;
  json j;
  j["seed"] = c.seed;
  j["fast"] = c.fast;
  j["geometry"] = {{"R", c.geometry.R},
                   {"W_over_R", c.geometry.W_over_R},
                   {"w_over_R", c.geometry.w_over_R},
                   {"S", c.geometry.S},
                   {"mu", c.geometry.mu}};
  j["transport"] = {{"grid",
                     {{"h", g.h},
                      {"core_half_x", g.core_half_x},
                      {"outer_half_x", g.outer_half_x},
                      {"core_rho", g.core_rho},
                      {"outer_rho", g.outer_rho},
                      {"stretch", g.stretch}}},
                    {"dt_max", c.transport.dt_max},
                    {"lambda", c.transport.lambda},
                    {"cfl", c.transport.cfl},
                    {"mask_cfl", c.transport.mask_cfl},
                    {"min_link_fraction", c.transport.min_link_fraction},
                    {"far_field", far_field_name(c.transport.far_field)},
                    {"hydro_substeps", c.transport.hydro_substeps}};
  j["validate"] = {{"towed_pe", c.validate.towed_pe},
                   {"towed_tolerance", c.validate.towed_tolerance},
                   {"towed_zero_tolerance", c.validate.towed_zero_tolerance},
                   {"towed_core_half_x", c.validate.towed_core_half_x},
                   {"towed_t_max", c.validate.towed_t_max},
                   {"substeps", c.validate.substeps},
                   {"stroke_wR", c.validate.stroke_wR},
                   {"scallop_tolerance", c.validate.scallop_tolerance}};
  j["sherwood"] = {{"pe", c.sherwood.pe}, {"wR", c.sherwood.wR}, {"horizon", c.sherwood.horizon}};
  j["transient"] = {{"pe", c.transient.pe}, {"horizon", c.transient.horizon}};
  j["generate"] = {{"pe", c.generate.pe},
                   {"n_actions", c.generate.n_actions},
                   {"gradient", c.generate.gradient},
                   {"s0", c.generate.s0}};
  j["learn"] = {{"log_dir", c.learn.log_dir},
                {"pe", c.learn.pe},
                {"n_batches", c.learn.n_batches},
                {"batch_size", c.learn.batch_size},
                {"gammas", c.learn.gammas},
                {"alphas", c.learn.alphas},
                {"tie_epsilon", c.learn.tie_epsilon}};
  j["surrogate"] = {{"model_dir", c.surrogate.model_dir},
                    {"pe", c.surrogate.pe},
                    {"n_actions", c.surrogate.n_actions},
                    {"n_batches", c.surrogate.n_batches},
                    {"eta_ladder", c.surrogate.eta_ladder}};
  return j;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(to_json(cfg).dump());
}

}  // namespace trisphere::cli
