#pragma once

#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/problem.hpp"
#include "seasonal_dispersal/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sdisp {

/// Numerical settings shared by the subcommands. substeps = 0 selects
/// default_substeps() for the problem.
struct SolverSettings {
  std::size_t substeps = 0;
  double eigen_tol = kDefaultEigenTol;
  int eigen_max_iter = kDefaultEigenMaxIter;
  double periodic_tol = 1e-8;
  int max_sweeps = 2000;
  int max_periods = 5000;
  std::size_t periods = 300;
  double extinct_threshold = 1e-6;
  double margin = 0.05;
  std::size_t floquet_substeps = 1024;
};

struct OutputSettings {
  /// Manifest path; empty means "<data file>.manifest.json".
  std::string manifest;
};

struct RunConfig {
  ProblemSpec problem;
  SeedSpec seed;
  SolverSettings solver;
  OutputSettings output;
  /// Resolved configuration with defaults applied, echoed into manifests.
  nlohmann::json echo;
};

/// Every violation found while validating a configuration.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::vector<std::string> errors, bool hypothesis_violation);
  const std::vector<std::string>& errors() const { return errors_; }
  /// True when at least one violation is a model hypothesis (kernel
  /// unresolved, wrap aliasing) rather than a malformed value.
  bool hypothesis_violation() const { return hypothesis_; }

 private:
  std::vector<std::string> errors_;
  bool hypothesis_;
};

/// Reads and validates a JSON configuration. Table paths are resolved
/// relative to the directory of the file.
RunConfig load_config(const std::filesystem::path& path);

/// Validates an already-parsed document.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");

/// Parses JSON text; syntax errors report line and column.
RunConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir = ".");

/// Numeric columns of a text table: '#' comments and blank lines skipped,
/// fields separated by commas or whitespace. A non-numeric first line is
/// treated as a header.
std::vector<std::vector<double>> read_numeric_table(const std::filesystem::path& path);

}  // namespace sdisp
