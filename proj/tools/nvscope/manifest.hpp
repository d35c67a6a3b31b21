#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace nvscope::app {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path &path);
/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path &path, std::string_view bytes);
std::string utc_now();

struct OutputRecord {
  std::string file;  // relative to the manifest directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string tool = "nvscope";
  std::string version{kToolVersion};
  std::string command;
  std::string config_path;
  std::string config_sha256;
  std::string started_utc;
  std::string finished_utc;
  std::optional<std::uint64_t> seed;
  std::vector<OutputRecord> outputs;
  nlohmann::json details = nlohmann::json::object();  // command-specific (e.g. PGM scaling)

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json &j);
};

/// Collects outputs of one command and records their checksums.
class OutputWriter {
public:
  explicit OutputWriter(std::filesystem::path dir);
  void write(const std::string &name, std::string_view bytes);
  const std::filesystem::path &dir() const { return dir_; }
  const std::vector<OutputRecord> &records() const { return records_; }

private:
  std::filesystem::path dir_;
  std::vector<OutputRecord> records_;
};

std::filesystem::path manifest_path(const std::filesystem::path &dir, std::string_view command);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Recomputes every listed checksum. A missing manifest is itself a problem.
VerifyReport verify_manifest(const std::filesystem::path &manifest);

} // namespace nvscope::app
