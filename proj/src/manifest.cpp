#include "socsamp/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "socsamp/version.hpp"

namespace socsamp {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("sha256: cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256: EVP context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["version"] = kVersion;
  j["replay_argv"] = replay_argv;
  j["config"] = config;
  j["seed"] = seed;
  j["threads"] = threads;
  nlohmann::json inputs = nlohmann::json::array();
  for (const std::string& path : input_paths)
    inputs.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  j["inputs"] = inputs;
  j["outputs"] = output_files;
  if (!extra.is_null()) j["diagnostics"] = extra;
  j["started_at"] = started_at;
  j["duration_seconds"] = duration_seconds;
  return j;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("manifest: cannot write " + path);
  out << manifest.to_json().dump(2) << '\n';
}

}  // namespace socsamp
