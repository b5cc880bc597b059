#include "randgas/manifest.hpp"

#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace randgas {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a64(const std::string& text) {
  return fnv1a64(text.data(), text.size());
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

int log_verbosity() {
  static const int level = [] {
    const char* env = std::getenv("RANDGAS_LOG");
    if (env == nullptr || *env == '\0') return 0;
    if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "2") == 0)
      return 2;
    if (std::strcmp(env, "info") == 0 || std::strcmp(env, "1") == 0) return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_verbosity() >= 1) std::cerr << "[randgas] " << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_verbosity() >= 2) std::cerr << "[randgas:debug] " << message << "\n";
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string output_header(std::uint64_t config_digest) {
  return std::string("# randgas ") + kVersion +
         " config_digest=" + hex64(config_digest) + "\n";
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config_path"] = config_path;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["version"] = version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["config_digest"] = config_digest;
  j["outputs"] = nlohmann::json::array();
  for (const auto& entry : outputs)
    j["outputs"].push_back({{"path", entry.path}, {"digest", entry.digest}});
  return j.dump(2) + "\n";
}

void write_artifact(RunManifest& manifest, const std::string& name,
                    std::uint64_t config_digest, const std::string& body) {
  const std::string contents = output_header(config_digest) + body;
  const std::filesystem::path path =
      std::filesystem::path(manifest.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  manifest.outputs.push_back({name, hex64(fnv1a64(contents))});
  log_debug("wrote " + path.string());
}

void write_manifest(const RunManifest& manifest) {
  const std::filesystem::path path =
      std::filesystem::path(manifest.output_dir) / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.to_json();
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  log_info("manifest written to " + path.string());
}

} // namespace randgas
