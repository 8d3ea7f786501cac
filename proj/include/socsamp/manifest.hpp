#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace socsamp {

std::string sha256_file(const std::string& path);

// One run's reproducibility record: the resolved configuration plus input
// digests are enough to regenerate the primary outputs byte for byte.
struct Manifest {
  std::string command;
  std::vector<std::string> replay_argv;  // canonical argv minus --out
  nlohmann::json config;                 // fully resolved configuration
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_files;  // primary outputs, relative to out dir
  nlohmann::json extra;                   // per-command diagnostics
  std::string started_at;
  double duration_seconds = 0.0;

  nlohmann::json to_json() const;
};

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace socsamp
