#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace randgas {

inline constexpr const char* kVersion = "v1.0.0";

// FNV-1a 64-bit content digest; stable across platforms, good enough to
// detect any accidental output drift between reruns.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

// Verbosity from the RANDGAS_LOG environment variable:
// unset/empty/"0"/"quiet" -> 0, "1"/"info" -> 1, "2"/"debug" -> 2.
int log_verbosity();
void log_info(const std::string& message);
void log_debug(const std::string& message);

std::string iso8601_utc_now();

// First line of every output file: version plus the digest of the config
// that produced it (timestamps stay out of outputs so reruns are
// digest-stable).
std::string output_header(std::uint64_t config_digest);

struct ManifestEntry {
  std::string path;   // relative to output_dir
  std::string digest; // fnv1a64 hex of the complete file contents
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string version = kVersion;
  std::string started_at;
  std::string finished_at;
  std::string config_digest;
  std::vector<ManifestEntry> outputs;

  std::string to_json() const;
};

// Writes output_dir/name with the standard header prepended and records the
// file and its digest in the manifest.
void write_artifact(RunManifest& manifest, const std::string& name,
                    std::uint64_t config_digest, const std::string& body);

// Serializes the manifest to output_dir/manifest.json.
void write_manifest(const RunManifest& manifest);

} // namespace randgas
