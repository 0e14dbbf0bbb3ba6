#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace freqseg::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

class RunManifest {
 public:
  explicit RunManifest(std::string command);

  nlohmann::ordered_json& config() noexcept { return config_; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  const std::vector<FileDigest>& inputs() const noexcept { return inputs_; }
  const std::vector<FileDigest>& outputs() const noexcept { return outputs_; }

  nlohmann::ordered_json to_json() const;
  /// Stamps the duration and writes pretty-printed JSON.
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace freqseg::cli
