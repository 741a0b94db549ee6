#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdisp {

/// Version string baked in at build time.
std::string artifact_version();

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Reals use 17 significant digits so that values round-trip exactly.
std::string format_real(double x);

/// Serialized CSV bytes; rows must match the header width.
std::string to_csv(const CsvTable& table);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Digest of the file contents on disk.
std::string file_sha256(const std::filesystem::path& path);

/// Writes the CSV and returns the digest of the bytes written.
std::string write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Writes text verbatim and returns its digest.
std::string write_text(const std::string& text, const std::filesystem::path& path);

/// Provenance record written next to every run's outputs.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config);

  /// Records the elapsed time since the previous mark (or construction).
  void mark_stage(const std::string& name);
  void add_file(const std::filesystem::path& path, const std::string& digest);
  /// Extra summary values (e.g. convergence diagnostics).
  nlohmann::json& summary() { return summary_; }

  nlohmann::json to_json() const;
  /// Stamps the finish time and writes the manifest.
  void write(const std::filesystem::path& path);

 private:
  std::string command_;
  nlohmann::json config_;
  std::string started_;
  std::string finished_;
  std::chrono::steady_clock::time_point last_;
  nlohmann::json stages_ = nlohmann::json::array();
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json summary_ = nlohmann::json::object();
};

struct ManifestCheck {
  bool ok = true;
  std::vector<std::string> mismatches;
};

/// Recomputes every recorded digest. Relative paths resolve against the
/// manifest's directory.
ManifestCheck verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace sdisp
