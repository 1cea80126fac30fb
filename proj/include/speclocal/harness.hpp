#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "speclocal/conventions.hpp"
#include "speclocal/flow.hpp"
#include "speclocal/localiser.hpp"

namespace speclocal {

/// Builds a model from a compact spec:
///   circle:M=60,k=1                  symbol e^{ik theta}
///   circle:M=200,symbol=1:1;0:0.5    coefficients k:re[:im] separated by ';'
///   qwz:L=12,m=1,offset=half         offset half|integer
///   shift:N=40,nu=1,H=1
///   manifest:path/to/manifest.yaml
ModelInstance build_model(const std::string& spec, const BuildOptions& options = {});

struct RunConfig {
  std::string model;
  std::vector<double> kappa;
  std::vector<double> rho;
  Mode mode = Mode::Permissive;
  std::filesystem::path out = "speclocal-out";
  std::uint64_t seed = 20240229;
  int workers = 0;
  int grid = kDefaultGridPoints;
  bool trace = false;
  std::string chi = "clamp";
  std::filesystem::path conventions;

  /// ConfigError when a list is empty or a value is out of range.
  void validate() const;
};

/// Reads a YAML run configuration; unknown keys are rejected.
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& config);
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const Certificate& certificate);
nlohmann::json to_json(const Inertia& inertia);

struct JobRecord {
  std::string model;
  double kappa = 0.0;
  double rho = 0.0;
  Mode mode = Mode::Permissive;
  std::optional<long> pairing;
  std::optional<long> oracle;  // convention-adjusted
  bool agreement = false;
  nlohmann::json details = nlohmann::json::object();
  std::string error_code;
  std::string error;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const JobRecord& record);

struct Report {
  std::string command;
  nlohmann::json config;
  std::vector<JobRecord> jobs;
  nlohmann::json extra = nlohmann::json::object();

  std::size_t passed() const;
  std::size_t failed() const;
  nlohmann::json to_json() const;
};

/// Writes report.json, summary.csv and config.yaml into `dir`.
void write_report(const std::filesystem::path& dir, const Report& report, const RunConfig* config);

/// One job per (kappa, rho): pairing with certificates compared to the
/// convention-adjusted oracle. Per-job errors are recorded, never thrown.
Report cmd_localise(const RunConfig& config);

/// Per (kappa, rho): crossing count on the truncated suspension path versus
/// the endpoint formula and the pairing; for odd models also the
/// conjugation flow of the polar phase against the Toeplitz index.
Report cmd_sf(const RunConfig& config);

/// Raw and convention-adjusted oracle values for the configured model.
Report cmd_oracle(const RunConfig& config);

/// Writes the model manifest, and for each (kappa, rho) the truncated
/// localiser in Matrix Market format.
Report cmd_export(const RunConfig& config);

}  // namespace speclocal
