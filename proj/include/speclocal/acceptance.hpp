#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "speclocal/conventions.hpp"

namespace speclocal {

enum class Profile { Quick, Full };

Profile parse_profile(const std::string& s);
std::string to_string(Profile profile);

struct AcceptanceOptions {
  Profile profile = Profile::Full;
  std::set<int> only;  // empty = all criteria
  Conventions conventions;
  std::uint64_t seed = 20240229;
  int workers = 0;
  std::ostream* log = nullptr;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::string summary;
  std::vector<std::string> failures;
  double seconds = 0.0;
  nlohmann::json data = nlohmann::json::object();
};

inline constexpr int kCriterionCount = 10;

/// Runs the acceptance criteria selected by `options.only`. Shared
/// computations (the model sweeps behind criteria 1-4) run once and feed the
/// certificate, flow and stability criteria.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS criterion 3 (title): summary [1.2 s]"
std::string format_line(const CriterionResult& result);

struct VerifyOptions {
  Profile profile = Profile::Quick;
  std::set<int> only;
  std::filesystem::path conventions;
  std::filesystem::path out;
  std::uint64_t seed = 20240229;
  int workers = 0;
};

/// Runs the suite, prints one line per criterion and writes verify.json into
/// `out` when set. Returns 0 when every selected criterion passes, 1 otherwise.
int cmd_verify(const VerifyOptions& options, std::ostream& out);

}  // namespace speclocal
