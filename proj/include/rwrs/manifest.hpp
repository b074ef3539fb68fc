#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwrs/version.hpp"

namespace rwrs {

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Provenance sidecar for one CLI run. Timestamps live here and only here;
// the data artifacts (CSV, JSON-lines) stay byte-stable across reruns.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_digest;
  std::uint64_t master_seed = 0;
  int threads = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["schema"] = "rwrs-manifest/1";
    j["tool"] = "rwrs";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config_path;
    j["config_digest"] = config_digest;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
  }
};

}  // namespace rwrs
