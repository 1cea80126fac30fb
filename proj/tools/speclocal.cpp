#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "speclocal/acceptance.hpp"
#include "speclocal/conventions.hpp"
#include "speclocal/error.hpp"
#include "speclocal/harness.hpp"

namespace {

using namespace speclocal;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config;
  std::string model;
  std::vector<double> kappa;
  std::vector<double> rho;
  std::string mode;
  std::optional<int> grid;
  std::string out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  std::string chi;
  std::string conventions;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "YAML run configuration");
  cmd->add_option("--model", f.model, "model spec, e.g. circle:M=60,k=1 or qwz:L=12,m=1");
  cmd->add_option("--kappa", f.kappa, "kappa values")->delimiter(',');
  cmd->add_option("--rho", f.rho, "rho values")->delimiter(',');
  cmd->add_option("--mode", f.mode, "strict or permissive");
  cmd->add_option("--grid", f.grid, "sample points on flow paths");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  cmd->add_option("--seed", f.seed, "seed for randomized checks");
  cmd->add_flag("--trace", f.trace, "write eigenvalue traces");
  cmd->add_option("--chi", f.chi, "clamp or smooth");
  cmd->add_option("--conventions", f.conventions, "sign convention file");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (!f.model.empty()) c.model = f.model;
  if (!f.kappa.empty()) c.kappa = f.kappa;
  if (!f.rho.empty()) c.rho = f.rho;
  if (!f.mode.empty()) c.mode = parse_mode(f.mode);
  if (f.grid) c.grid = *f.grid;
  if (!f.out.empty()) c.out = f.out;
  if (f.workers) c.workers = *f.workers;
  if (f.seed) c.seed = *f.seed;
  if (f.trace) c.trace = true;
  if (!f.chi.empty()) c.chi = f.chi;
  if (!f.conventions.empty()) c.conventions = f.conventions;
  return c;
}

int finish(const Report& report, const RunConfig& config) {
  write_report(config.out, report, &config);
  for (const auto& job : report.jobs) {
    std::cout << job.model << " kappa=" << job.kappa << " rho=" << job.rho << ": ";
    if (!job.error.empty()) {
      std::cout << job.error_code << ": " << job.error;
    } else {
      if (job.pairing) std::cout << "pairing " << *job.pairing << " ";
      if (job.oracle) std::cout << "oracle " << *job.oracle << " ";
      std::cout << (job.agreement ? "ok" : "MISMATCH");
    }
    std::cout << '\n';
  }
  std::cout << report.passed() << "/" << report.jobs.size() << " jobs passed; report in "
            << config.out.string() << '\n';
  return report.failed() == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral localiser index pairings"};
  app.require_subcommand(1);

  Flags localise_flags, sf_flags, oracle_flags, export_flags;
  auto* localise = app.add_subcommand("localise", "pairing sweep over (kappa, rho)");
  add_run_flags(localise, localise_flags);
  auto* sf = app.add_subcommand("sf", "spectral-flow consistency checks");
  add_run_flags(sf, sf_flags);
  auto* oracle = app.add_subcommand("oracle", "independent oracle values");
  add_run_flags(oracle, oracle_flags);
  bool derive = false;
  oracle->add_flag("--derive-conventions", derive,
                   "derive the sign conventions and write them to --conventions");
  auto* exporter = app.add_subcommand("export", "write model and truncated localisers");
  add_run_flags(exporter, export_flags);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::string profile = "quick", verify_conventions, verify_out;
  std::vector<int> only;
  std::uint64_t verify_seed = 20240229;
  int verify_workers = 0;
  verify->add_option("--profile", profile, "quick or full");
  verify->add_option("--only", only, "criteria to run")->delimiter(',');
  verify->add_option("--conventions", verify_conventions, "sign convention file");
  verify->add_option("--out", verify_out, "directory for verify.json");
  verify->add_option("--seed", verify_seed, "seed for randomized checks");
  verify->add_option("--workers", verify_workers, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (localise->parsed()) {
      const RunConfig c = resolve(localise_flags);
      return finish(cmd_localise(c), c);
    }
    if (sf->parsed()) {
      const RunConfig c = resolve(sf_flags);
      return finish(cmd_sf(c), c);
    }
    if (oracle->parsed()) {
      if (derive) {
        const ConventionDerivation d = derive_conventions();
        const std::filesystem::path path = oracle_flags.conventions.empty()
                                               ? default_conventions_path()
                                               : std::filesystem::path(oracle_flags.conventions);
        save_conventions(path, d.conventions);
        std::cout << "circle: pairing " << d.circle_pairing << ", winding " << d.circle_oracle
                  << "\nqwz: pairing " << d.qwz_pairing << ", chern " << d.qwz_oracle
                  << "\neven_sign = " << d.conventions.even_sign
                  << "\nodd_sign = " << d.conventions.odd_sign << "\nwritten to " << path.string()
                  << '\n';
        return 0;
      }
      const RunConfig c = resolve(oracle_flags);
      return finish(cmd_oracle(c), c);
    }
    if (exporter->parsed()) {
      const RunConfig c = resolve(export_flags);
      return finish(cmd_export(c), c);
    }
    if (verify->parsed()) {
      VerifyOptions v;
      v.profile = parse_profile(profile);
      v.only = std::set<int>(only.begin(), only.end());
      v.conventions = verify_conventions;
      v.out = verify_out;
      v.seed = verify_seed;
      v.workers = verify_workers;
      return cmd_verify(v, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
