#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwrs/experiment.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/step_law.hpp"

namespace rwrs {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config error at " + path + ": missing field '" + key + "'");
  return *it;
}

inline double number_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_number()) throw ConfigError("config error at " + path + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::int64_t integer_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_number_integer()) {
    throw ConfigError("config error at " + path + "." + key + ": expected an integer");
  }
  return v.get<std::int64_t>();
}

inline std::string string_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_string()) throw ConfigError("config error at " + path + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace detail

inline StepLaw step_law_from_json(const json& j, const std::string& path = "law") {
  const std::string family = detail::string_at(j, "family", path);
  if (family == "unit") return StepLaw::deterministic_unit();
  if (family == "zipf") {
    const double alpha = detail::number_at(j, "alpha", path);
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("config error at " + path + ".alpha: must lie in (0,1)");
    }
    std::int64_t cutoff = std::int64_t{1} << 16;
    if (j.contains("tail_cutoff")) cutoff = detail::integer_at(j, "tail_cutoff", path);
    return StepLaw::symmetric_zipf(alpha, cutoff);
  }
  throw ConfigError("config error at " + path + ".family: unknown step law '" + family + "'");
}

inline json step_law_to_json(const StepLaw& law) {
  json j;
  if (law.is_zipf()) {
    j["family"] = "zipf";
    j["alpha"] = law.alpha();
    j["tail_cutoff"] = law.tail_cutoff();
  } else {
    j["family"] = "unit";
  }
  return j;
}

inline ScenerySpec scenery_from_json(const json& j, std::uint64_t master_seed,
                                     const std::string& path = "scenery") {
  const std::string family = detail::string_at(j, "family", path);
  const RngKey binding{master_seed, 0, kRoleScenery};
  if (family == "frechet") {
    return ScenerySpec::iid_frechet(detail::number_at(j, "beta", path), binding);
  }
  if (family == "exponential") return ScenerySpec::iid_exponential(binding);
  if (family == "negpow") {
    return ScenerySpec::iid_neg_pow(detail::number_at(j, "delta", path), binding);
  }
  if (family == "moving_max") {
    const auto window = detail::integer_at(j, "window", path);
    double beta = 1.0;
    if (j.contains("beta")) beta = detail::number_at(j, "beta", path);
    return ScenerySpec::moving_max(static_cast<int>(window), binding, beta);
  }
  if (family == "gaussian_ma") {
    const json& w = detail::require_field(j, "weights", path);
    if (!w.is_array() || w.empty()) {
      throw ConfigError("config error at " + path + ".weights: expected a non-empty array");
    }
    std::vector<double> weights;
    for (const auto& e : w) {
      if (!e.is_number()) throw ConfigError("config error at " + path + ".weights: expected numbers");
      weights.push_back(e.get<double>());
    }
    return ScenerySpec::gaussian_ma(std::move(weights), binding);
  }
  throw ConfigError("config error at " + path + ".family: unknown scenery family '" + family + "'");
}

inline json scenery_to_json(const ScenerySpec& spec) {
  json j;
  j["family"] = family_name(spec.family());
  switch (spec.family()) {
    case SceneryFamily::iid_frechet: j["beta"] = spec.beta(); break;
    case SceneryFamily::iid_exponential: break;
    case SceneryFamily::iid_neg_pow: j["delta"] = spec.delta(); break;
    case SceneryFamily::moving_max:
      j["window"] = spec.window();
      j["beta"] = spec.beta();
      break;
    case SceneryFamily::gaussian_ma: j["weights"] = spec.weights(); break;
  }
  return j;
}

inline Box box_from_json(const json& j, const std::string& path) {
  Box box;
  const json& t = detail::require_field(j, "t", path);
  if (!t.is_array() || t.size() != 2) {
    throw ConfigError("config error at " + path + ".t: expected [lo, hi]");
  }
  box.t_lo = t[0].get<double>();
  box.t_hi = t[1].get<double>();
  const json& vals = detail::require_field(j, "values", path);
  if (!vals.is_array() || vals.empty()) {
    throw ConfigError("config error at " + path + ".values: expected a non-empty array");
  }
  for (const auto& iv : vals) {
    if (!iv.is_array() || iv.size() != 2) {
      throw ConfigError("config error at " + path + ".values: expected [lo, hi] pairs");
    }
    ValueInterval v;
    v.lo = iv[0].get<double>();
    v.hi = iv[1].is_null() ? std::numeric_limits<double>::infinity() : iv[1].get<double>();
    box.values.push_back(v);
  }
  box.validate();
  return box;
}

inline json box_to_json(const Box& box) {
  json j;
  j["t"] = {box.t_lo, box.t_hi};
  json vals = json::array();
  for (const auto& v : box.values) {
    json iv = json::array();
    iv.push_back(v.lo);
    if (std::isinf(v.hi)) {
      iv.push_back(nullptr);
    } else {
      iv.push_back(v.hi);
    }
    vals.push_back(iv);
  }
  j["values"] = vals;
  return j;
}

// Parameters for estimating q on the fly when a config does not pin it.
struct QEstimationPlan {
  std::int64_t horizon = 10000;
  std::int64_t reps = 100000;
};

struct ExperimentFile {
  ExperimentConfig config;
  std::optional<QEstimationPlan> q_plan;  // set when q_hat must be estimated first
};

inline constexpr const char* kExperimentSchema = "rwrs-experiment/1";

inline ExperimentFile experiment_from_json(const json& j) {
  if (detail::string_at(j, "schema", "$") != kExperimentSchema) {
    throw ConfigError("config error at schema: expected '" + std::string(kExperimentSchema) + "'");
  }
  ExperimentFile file;
  auto& cfg = file.config;
  cfg.master_seed = static_cast<std::uint64_t>(detail::integer_at(j, "master_seed", "$"));
  cfg.law = step_law_from_json(detail::require_field(j, "law", "$"));
  cfg.scenery = scenery_from_json(detail::require_field(j, "scenery", "$"), cfg.master_seed);
  cfg.n = detail::integer_at(j, "n", "$");
  cfg.reps = detail::integer_at(j, "reps", "$");
  const json& boxes = detail::require_field(j, "boxes", "$");
  if (!boxes.is_array() || boxes.empty()) {
    throw ConfigError("config error at boxes: expected a non-empty array");
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    cfg.boxes.push_back(box_from_json(boxes[i], "boxes[" + std::to_string(i) + "]"));
  }
  if (j.contains("levels")) {
    for (const auto& x : j["levels"]) cfg.levels.push_back(x.get<double>());
  }
  if (j.contains("negative_control")) cfg.negative_control = j["negative_control"].get<bool>();
  if (j.contains("q_hat")) {
    const json& q = j["q_hat"];
    cfg.q_hat.mean = detail::number_at(q, "mean", "q_hat");
    cfg.q_hat.std_err = detail::number_at(q, "stderr", "q_hat");
    cfg.q_hat.replications = q.contains("replications") ? q["replications"].get<std::int64_t>() : 0;
  } else if (!cfg.law.is_zipf()) {
    cfg.q_hat = McEstimate{1.0, 0.0, 1, 0.95};  // unit-drift walk never returns
  } else if (j.contains("q_estimation")) {
    const json& q = j["q_estimation"];
    QEstimationPlan plan;
    plan.horizon = detail::integer_at(q, "horizon", "q_estimation");
    plan.reps = detail::integer_at(q, "reps", "q_estimation");
    file.q_plan = plan;
    cfg.q_hat = McEstimate{0.5, 0.0, 0, 0.95};  // placeholder until estimated
  } else {
    throw ConfigError("config error at q_hat: zipf configs need q_hat or q_estimation");
  }
  return file;
}

inline ExperimentFile load_experiment_file(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw ConfigError("cannot open config file: " + file_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + file_path + ": " + e.what());
  }
  return experiment_from_json(j);
}

// Diagnostics run description: condition functionals across an n grid.
struct DiagnosticsConfig {
  StepLaw law;
  ScenerySpec scenery;
  std::vector<std::int64_t> n_grid;
  double x = 1.0;
  std::vector<std::int64_t> k_ladder{1, 2, 4, 8, 16};
  std::int64_t dk_n = 10000;
  double dk_x = 1.0;
  std::int64_t reps = 20000;
  std::int64_t theta_reps = 400;
  std::int64_t obrien_n = 10000;
  std::int64_t obrien_outer = 200;
  std::int64_t obrien_inner = 200;
  McEstimate q_hat{1.0, 0.0, 1, 0.95};
  std::optional<QEstimationPlan> q_plan;
  std::uint64_t master_seed = 0;
};

inline constexpr const char* kDiagnosticsSchema = "rwrs-diagnostics/1";

inline DiagnosticsConfig diagnostics_from_json(const json& j) {
  if (detail::string_at(j, "schema", "$") != kDiagnosticsSchema) {
    throw ConfigError("config error at schema: expected '" + std::string(kDiagnosticsSchema) + "'");
  }
  DiagnosticsConfig cfg;
  cfg.master_seed = static_cast<std::uint64_t>(detail::integer_at(j, "master_seed", "$"));
  cfg.law = step_law_from_json(detail::require_field(j, "law", "$"));
  cfg.scenery = scenery_from_json(detail::require_field(j, "scenery", "$"), cfg.master_seed);
  const json& grid = detail::require_field(j, "n_grid", "$");
  if (!grid.is_array() || grid.empty()) {
    throw ConfigError("config error at n_grid: expected a non-empty array");
  }
  for (const auto& n : grid) cfg.n_grid.push_back(n.get<std::int64_t>());
  if (j.contains("x")) cfg.x = j["x"].get<double>();
  if (j.contains("k_ladder")) {
    cfg.k_ladder.clear();
    for (const auto& k : j["k_ladder"]) cfg.k_ladder.push_back(k.get<std::int64_t>());
  }
  if (j.contains("dk_n")) cfg.dk_n = j["dk_n"].get<std::int64_t>();
  if (j.contains("dk_x")) cfg.dk_x = j["dk_x"].get<double>();
  if (j.contains("reps")) cfg.reps = j["reps"].get<std::int64_t>();
  if (j.contains("theta_reps")) cfg.theta_reps = j["theta_reps"].get<std::int64_t>();
  if (j.contains("obrien")) {
    const json& o = j["obrien"];
    cfg.obrien_n = detail::integer_at(o, "n", "obrien");
    cfg.obrien_outer = detail::integer_at(o, "outer", "obrien");
    cfg.obrien_inner = detail::integer_at(o, "inner", "obrien");
  }
  if (j.contains("q_hat")) {
    const json& q = j["q_hat"];
    cfg.q_hat.mean = detail::number_at(q, "mean", "q_hat");
    cfg.q_hat.std_err = detail::number_at(q, "stderr", "q_hat");
  } else if (cfg.law.is_zipf()) {
    if (j.contains("q_estimation")) {
      const json& q = j["q_estimation"];
      QEstimationPlan plan;
      plan.horizon = detail::integer_at(q, "horizon", "q_estimation");
      plan.reps = detail::integer_at(q, "reps", "q_estimation");
      cfg.q_plan = plan;
    } else {
      throw ConfigError("config error at q_hat: zipf configs need q_hat or q_estimation");
    }
  }
  return cfg;
}

inline DiagnosticsConfig load_diagnostics_file(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw ConfigError("cannot open config file: " + file_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + file_path + ": " + e.what());
  }
  return diagnostics_from_json(j);
}

}  // namespace rwrs
