#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwrs/experiment.hpp"
#include "rwrs/point_process.hpp"

namespace rwrs {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  return out;
}

}  // namespace detail

// One replication per line: counts, void indicators, raw path max, the
// (t, v) pairs used by the independence test, per-level exceedance stats.
inline void write_records_jsonl(const std::string& path, const RunResult& result,
                                const ExperimentConfig& config) {
  auto out = detail::open_output(path);
  for (const auto& rec : result.records) {
    nlohmann::ordered_json j;
    j["rep"] = rec.rep;
    j["n"] = config.n;
    j["m_n"] = result.m_n;
    j["seed"] = config.master_seed;
    j["R_n"] = rec.range_total;
    j["counts"] = rec.box_counts;
    nlohmann::ordered_json voids = nlohmann::ordered_json::array();
    for (std::int64_t c : rec.box_counts) voids.push_back(c == 0);
    j["voids"] = voids;
    j["max"] = rec.max_value;
    j["first_point"] = {rec.first_t, rec.first_v};
    j["mid_point"] = {rec.mid_t, rec.mid_v};
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < rec.level_counts.size(); ++l) {
      nlohmann::ordered_json e;
      e["x"] = config.levels[l];
      e["exceedances"] = rec.level_counts[l].exceedances;
      e["blocks_hit"] = rec.level_counts[l].blocks_hit;
      levels.push_back(e);
    }
    j["levels"] = levels;
    out << j.dump() << "\n";
  }
}

inline std::string pattern_jsonl_line(const PointPattern& pattern, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["n"] = pattern.n;
  j["m_n"] = pattern.m_n;
  j["seed"] = seed;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& [t, v] : pattern.points) pts.push_back({t, v});
  j["points"] = pts;
  return j.dump();
}

inline void write_verdicts_csv(const std::string& path, const std::vector<TestVerdict>& verdicts) {
  auto out = detail::open_output(path);
  out << "name,statistic,target,tolerance,stderr,pass\n";
  for (const auto& v : verdicts) {
    out << v.name << ',' << detail::fmt_double(v.statistic) << ',' << detail::fmt_double(v.target)
        << ',' << detail::fmt_double(v.tolerance) << ',' << detail::fmt_double(v.std_err) << ','
        << (v.pass ? "true" : "false") << "\n";
  }
}

struct DiagnosticRow {
  std::int64_t n = 0;
  std::string functional;
  double estimate = 0.0;
  double std_err = 0.0;
};

inline void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticRow>& rows) {
  auto out = detail::open_output(path);
  out << "n,functional,estimate,stderr\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.functional << ',' << detail::fmt_double(r.estimate) << ','
        << detail::fmt_double(r.std_err) << "\n";
  }
}

}  // namespace rwrs
