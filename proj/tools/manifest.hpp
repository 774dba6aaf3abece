#pragma once

// Run manifests and crash-safe output files for the command-line tool.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace parmine::cli {

inline constexpr int kManifestSchemaVersion = 1;

/// Lowercase hex SHA-256 of a file's bytes. Throws InputError if unreadable.
std::string sha256_file(const std::string& path);

/// Writes through `fill` into a sibling temporary file, then renames it over
/// `path`. On any exception the temporary is removed and `path` is untouched.
void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& fill);

class Manifest {
 public:
  explicit Manifest(std::string command);

  void set_config(const std::string& key, std::string value);
  void add_input(const std::string& role, const std::string& path);
  void add_output(const std::string& role, const std::string& path);
  void set_count(const std::string& key, std::uint64_t value);
  void set_seconds(const std::string& stage, double seconds);
  void set_result(nlohmann::json result) { result_ = std::move(result); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_jobs(std::size_t jobs) { jobs_ = jobs; }

  /// Without `runtime`, the manifest omits timestamps, wall-clock times and
  /// the worker count, so reruns with identical inputs are byte-identical.
  nlohmann::json to_json(bool runtime) const;
  void write(const std::string& path, bool runtime) const;

 private:
  std::string command_;
  std::string started_at_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json counts_ = nlohmann::json::object();
  nlohmann::json seconds_ = nlohmann::json::object();
  nlohmann::json result_;
  std::uint64_t seed_ = 0;
  std::size_t jobs_ = 1;
};

}  // namespace parmine::cli
