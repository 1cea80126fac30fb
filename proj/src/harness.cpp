#include "speclocal/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "speclocal/error.hpp"
#include "speclocal/matrix_market.hpp"
#include "speclocal/oracles.hpp"

namespace speclocal {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "model spec: '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) fail(ErrorCode::ConfigError, "model spec: '" + key + "' expects an integer");
  return static_cast<int>(v);
}

std::vector<SymbolTerm> parse_symbol(const std::string& value) {
  std::vector<SymbolTerm> out;
  for (const auto& term : split(value, ';')) {
    const auto parts = split(term, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      fail(ErrorCode::ConfigError, "symbol term '" + term + "' must be k:re[:im]");
    }
    out.push_back({parse_int("symbol", parts[0]),
                   Complex(parse_double("symbol", parts[1]),
                           parts.size() == 3 ? parse_double("symbol", parts[2]) : 0.0)});
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void record_error(JobRecord& record, const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    record.error_code = std::string(to_string(err->code()));
  } else {
    record.error_code = "Exception";
  }
  record.error = e.what();
}

Conventions conventions_for(const RunConfig& config) {
  return load_conventions(config.conventions.empty() ? default_conventions_path()
                                                     : config.conventions);
}

ChiPair chi_for(const RunConfig& config) {
  if (config.chi == "clamp") return ChiPair::clamp();
  if (config.chi == "smooth") return ChiPair::smooth();
  fail(ErrorCode::ConfigError, "chi must be clamp or smooth, got '" + config.chi + "'");
}

struct JobGrid {
  std::vector<std::pair<double, double>> params;
};

JobGrid job_grid(const RunConfig& config) {
  JobGrid g;
  for (double k : config.kappa) {
    for (double r : config.rho) g.params.emplace_back(k, r);
  }
  return g;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ModelInstance build_model(const std::string& spec, const BuildOptions& options) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    fail(ErrorCode::ConfigError, "model spec '" + spec + "' must look like kind:key=value,...");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "manifest") return load_model(rest);

  std::map<std::string, std::string> kv;
  for (const auto& item : split(rest, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "model spec item '" + item + "' lacks '='");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto take = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    std::string v = it == kv.end() ? fallback : it->second;
    if (it != kv.end()) kv.erase(it);
    if (v.empty()) fail(ErrorCode::ConfigError, "model spec for '" + kind + "' needs '" + key + "'");
    return v;
  };

  ModelInstance model;
  if (kind == "circle") {
    const int modes = parse_int("M", take("M", "60"));
    std::vector<SymbolTerm> symbol;
    if (kv.count("symbol")) {
      symbol = parse_symbol(take("symbol", ""));
    } else {
      symbol = {{parse_int("k", take("k", "1")), Complex(1.0)}};
    }
    model = build_circle_model(modes, symbol, options);
  } else if (kind == "qwz") {
    const int box = parse_int("L", take("L", "12"));
    const double mass = parse_double("m", take("m", "1"));
    const Offset offset = parse_offset(take("offset", "half"));
    model = build_qwz_model(box, mass, offset, options);
  } else if (kind == "shift") {
    const int size = parse_int("N", take("N", "40"));
    const int nu = parse_int("nu", take("nu", "1"));
    const int h = parse_int("H", take("H", "1"));
    model = build_weighted_shift_dirac(size, nu, h);
  } else {
    fail(ErrorCode::ConfigError, "unknown model kind '" + kind + "'");
  }
  if (!kv.empty()) fail(ErrorCode::ConfigError, "unknown model spec key '" + kv.begin()->first + "'");
  return model;
}

void RunConfig::validate() const {
  if (model.empty()) fail(ErrorCode::ConfigError, "config: model is required");
  if (kappa.empty()) fail(ErrorCode::ConfigError, "config: kappa list is empty");
  if (rho.empty()) fail(ErrorCode::ConfigError, "config: rho list is empty");
  for (double k : kappa) {
    if (!(k > 0.0)) fail(ErrorCode::ConfigError, "config: kappa values must be positive");
  }
  for (double r : rho) {
    if (!(r > 0.0)) fail(ErrorCode::ConfigError, "config: rho values must be positive");
  }
  if (workers < 0) fail(ErrorCode::ConfigError, "config: workers must be >= 0");
  if (grid < 2) fail(ErrorCode::ConfigError, "config: grid must be >= 2");
  if (chi != "clamp" && chi != "smooth") fail(ErrorCode::ConfigError, "config: chi must be clamp or smooth");
}

RunConfig load_run_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::ConfigError, "cannot read config " + path.string() + ": " + e.what());
  }
  if (!root.IsMap()) fail(ErrorCode::ConfigError, "config root must be a mapping");
  RunConfig c;
  auto list = [](const YAML::Node& n) {
    std::vector<double> out;
    if (n.IsSequence()) {
      for (const auto& v : n) out.push_back(v.as<double>());
    } else {
      out.push_back(n.as<double>());
    }
    return out;
  };
  try {
    for (const auto& item : root) {
      const auto key = item.first.as<std::string>();
      const YAML::Node& v = item.second;
      if (key == "model") {
        c.model = v.as<std::string>();
      } else if (key == "kappa") {
        c.kappa = list(v);
      } else if (key == "rho") {
        c.rho = list(v);
      } else if (key == "mode") {
        c.mode = parse_mode(v.as<std::string>());
      } else if (key == "out") {
        c.out = v.as<std::string>();
      } else if (key == "seed") {
        c.seed = v.as<std::uint64_t>();
      } else if (key == "workers") {
        c.workers = v.as<int>();
      } else if (key == "grid") {
        c.grid = v.as<int>();
      } else if (key == "trace") {
        c.trace = v.as<bool>();
      } else if (key == "chi") {
        c.chi = v.as<std::string>();
      } else if (key == "conventions") {
        c.conventions = v.as<std::string>();
      } else {
        fail(ErrorCode::ConfigError, "config: unknown key '" + key + "'");
      }
    }
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
  return c;
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << c.model;
  out << YAML::Key << "kappa" << YAML::Value << YAML::Flow << c.kappa;
  out << YAML::Key << "rho" << YAML::Value << YAML::Flow << c.rho;
  out << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
  out << YAML::Key << "out" << YAML::Value << c.out.string();
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::Key << "grid" << YAML::Value << c.grid;
  out << YAML::Key << "trace" << YAML::Value << c.trace;
  out << YAML::Key << "chi" << YAML::Value << c.chi;
  out << YAML::Key << "conventions" << YAML::Value
      << (c.conventions.empty() ? default_conventions_path() : c.conventions).string();
  out << YAML::EndMap;
  std::ofstream file(path);
  if (!file) fail(ErrorCode::ConfigError, "cannot write " + path.string());
  file << out.c_str() << '\n';
}

json to_json(const RunConfig& c) {
  return json{{"model", c.model},   {"kappa", c.kappa},     {"rho", c.rho},
              {"mode", to_string(c.mode)}, {"out", c.out.string()}, {"seed", c.seed},
              {"workers", c.workers}, {"grid", c.grid},     {"trace", c.trace},
              {"chi", c.chi},       {"conventions", c.conventions.string()}};
}

json to_json(const Certificate& c) {
  return json{{"name", c.name},         {"relation", c.relation}, {"measured", c.measured},
              {"bound", c.bound},       {"holds", c.holds},       {"satisfied", c.satisfied},
              {"required", c.required}, {"note", c.note}};
}

json to_json(const Inertia& i) {
  return json{{"n_pos", i.n_pos}, {"n_neg", i.n_neg}, {"n_zero", i.n_zero}};
}

json to_json(const JobRecord& r) {
  json j{{"model", r.model},
         {"kappa", r.kappa},
         {"rho", r.rho},
         {"mode", to_string(r.mode)},
         {"pairing", r.pairing ? json(*r.pairing) : json(nullptr)},
         {"oracle", r.oracle ? json(*r.oracle) : json(nullptr)},
         {"agreement", r.agreement},
         {"details", r.details},
         {"wall_seconds", r.wall_seconds}};
  if (!r.error_code.empty()) {
    j["error_code"] = r.error_code;
    j["error"] = r.error;
  }
  return j;
}

std::size_t Report::passed() const {
  std::size_t n = 0;
  for (const auto& j : jobs) n += j.agreement ? 1 : 0;
  return n;
}

std::size_t Report::failed() const { return jobs.size() - passed(); }

json Report::to_json() const {
  json j{{"command", command}, {"config", config}, {"jobs", json::array()}};
  for (const auto& r : jobs) j["jobs"].push_back(speclocal::to_json(r));
  j["summary"] = json{{"jobs", jobs.size()}, {"passed", passed()}, {"failed", failed()}};
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

void write_report(const std::filesystem::path& dir, const Report& report, const RunConfig* config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) fail(ErrorCode::ConfigError, "cannot write report into " + dir.string());
    out << std::setw(2) << report.to_json() << '\n';
  }
  {
    std::ofstream out(dir / "summary.csv");
    out << std::setprecision(17);
    out << "model,kappa,rho,mode,pairing,oracle,agreement,error_code,wall_seconds\n";
    for (const auto& r : report.jobs) {
      out << '"' << r.model << "\"," << r.kappa << ',' << r.rho << ',' << to_string(r.mode) << ','
          << (r.pairing ? std::to_string(*r.pairing) : "") << ','
          << (r.oracle ? std::to_string(*r.oracle) : "") << ',' << (r.agreement ? 1 : 0) << ','
          << r.error_code << ',' << r.wall_seconds << '\n';
    }
  }
  if (config) save_run_config(dir / "config.yaml", *config);
}

Report cmd_localise(const RunConfig& config) {
  config.validate();
  Report report;
  report.command = "localise";
  report.config = to_json(config);
  const Conventions conventions = conventions_for(config);
  const ModelInstance model = build_model(config.model);
  const long raw = raw_oracle(model);
  const long expected = expected_pairing(model, raw, conventions);
  report.extra["model"] = model.describe();
  report.extra["raw_oracle"] = raw;
  report.extra["oracle_ref"] = to_string(model.oracle_ref);

  // The untruncated certificate depends on kappa only.
  std::vector<std::optional<Certificate>> full_box(config.kappa.size());
  std::vector<std::string> full_box_error(config.kappa.size());
  kernels::for_each_index(
      config.kappa.size(),
      [&](std::size_t i) {
        try {
          full_box[i] = validate_infinite_regime(model, config.kappa[i], config.mode);
        } catch (const Error& e) {
          full_box_error[i] = e.what();
        }
      },
      Execution::Parallel, config.workers);

  const JobGrid grid = job_grid(config);
  report.jobs.resize(grid.params.size());
  kernels::for_each_index(
      grid.params.size(),
      [&](std::size_t i) {
        const auto [kappa, rho] = grid.params[i];
        JobRecord& r = report.jobs[i];
        r.model = model.describe();
        r.kappa = kappa;
        r.rho = rho;
        r.mode = config.mode;
        r.oracle = expected;
        const auto start = Clock::now();
        try {
          const std::size_t k = i / config.rho.size();
          if (!full_box[k]) fail(ErrorCode::HypothesisViolated, full_box_error[k]);
          const PairingResult p = pairing(model, {kappa, rho, config.mode}, {false, false});
          json certs = json::array();
          for (const auto& c : p.certificates) certs.push_back(to_json(c));
          certs.push_back(to_json(*full_box[k]));
          r.details = json{{"inertia", to_json(p.inertia)},
                           {"signature", p.signature},
                           {"index_correction", p.index_correction},
                           {"rank", p.rank},
                           {"truncated_gap", p.truncated_gap},
                           {"certificates", certs},
                           {"raw_oracle", raw}};
          if (config.mode == Mode::Strict && !full_box[k]->satisfied) {
            fail(ErrorCode::StrictModeViolation, "full_box_gap certificate fails");
          }
          r.pairing = p.value;
          r.agreement = p.value == expected;
        } catch (const std::exception& e) {
          record_error(r, e);
        }
        r.wall_seconds = seconds_since(start);
      },
      Execution::Parallel, config.workers);
  return report;
}

Report cmd_sf(const RunConfig& config) {
  config.validate();
  Report report;
  report.command = "sf";
  report.config = to_json(config);
  const Conventions conventions = conventions_for(config);
  const ModelInstance model = build_model(config.model, BuildOptions{false});
  const long raw = raw_oracle(model);
  const long expected = expected_pairing(model, raw, conventions);
  const ChiPair chi = chi_for(config);
  report.extra["model"] = model.describe();
  report.extra["raw_oracle"] = raw;

  const JobGrid grid = job_grid(config);
  report.jobs.resize(grid.params.size());
  kernels::for_each_index(
      grid.params.size(),
      [&](std::size_t i) {
        const auto [kappa, rho] = grid.params[i];
        JobRecord& r = report.jobs[i];
        r.model = model.describe();
        r.kappa = kappa;
        r.rho = rho;
        r.mode = config.mode;
        r.oracle = expected;
        const auto start = Clock::now();
        try {
          const OperatorPath path =
              suspension(model, kappa, chi, uniform_grid(-1.0, 1.0, config.grid), rho);
          SfOptions options;
          options.trace = config.trace;
          options.execution = Execution::Serial;
          const SfResult sf = sf_crossings(path, options);
          const long ends = sf_endpoints(path.evaluate(path.start()), path.evaluate(path.end()));
          const PairingResult p = pairing(model, {kappa, rho, config.mode}, {false, false});
          json ledger = json::array();
          for (const auto& c : sf.ledger) {
            ledger.push_back(json{{"t0", c.t0}, {"t1", c.t1}, {"crossings", c.crossings}});
          }
          r.details = json{{"sf_crossings", sf.value},     {"sf_endpoints", ends},
                           {"pairing", p.value},           {"ledger", ledger},
                           {"replaced_samples", sf.replaced_samples},
                           {"epsilon", sf.epsilon},        {"chi", chi.name},
                           {"path_dim", path.dim}};
          bool ok = sf.value == ends && ends == p.value && p.value == expected;
          if (model.parity == Parity::Odd) {
            const Matrix u = polar_phase(model.k_rep);
            const RealVector shifted =
                model.dirac().matrix().diagonal().real().array() + 0.5;
            const HermitianOperator d_half = HermitianOperator::diagonal(shifted);
            const ConjugationResult conj = sf_conjugation(d_half, u, rho, config.grid);
            const ToeplitzResult toe = toeplitz_index(u, d_half, rho);
            r.details["conjugation"] = json{{"crossings", conj.crossings},
                                            {"endpoints", conj.endpoints},
                                            {"window_dim", conj.window_dim},
                                            {"toeplitz_index", toe.index},
                                            {"toeplitz_kernel", toe.kernel},
                                            {"toeplitz_cokernel", toe.cokernel}};
            ok = ok && conj.crossings == conj.endpoints && conj.crossings == toe.index &&
                 conj.crossings == p.value;
          }
          if (config.trace) {
            write_trace_csv((config.out / ("trace_kappa" + format_number(kappa) + "_rho" +
                                           format_number(rho) + ".csv"))
                                .string(),
                            sf);
          }
          r.pairing = sf.value;
          r.agreement = ok;
        } catch (const std::exception& e) {
          record_error(r, e);
        }
        r.wall_seconds = seconds_since(start);
      },
      Execution::Parallel, config.workers);
  return report;
}

Report cmd_oracle(const RunConfig& config) {
  if (config.model.empty()) fail(ErrorCode::ConfigError, "config: model is required");
  Report report;
  report.command = "oracle";
  report.config = to_json(config);
  const Conventions conventions = conventions_for(config);
  const ModelInstance model = build_model(config.model, BuildOptions{false});
  JobRecord r;
  r.model = model.describe();
  const auto start = Clock::now();
  try {
    const long raw = raw_oracle(model);
    r.oracle = expected_pairing(model, raw, conventions);
    r.details = json{{"oracle_ref", to_string(model.oracle_ref)}, {"raw_oracle", raw}};
    if (model.kind == ModelKind::EvenQwz) {
      const long fine = chern_number_fhs(qwz_bloch_function(model.params.mass), 2 * kDefaultFhsGrid);
      r.details["fhs_grid_96"] = fine;
      r.agreement = fine == raw;
    } else if (model.kind == ModelKind::OddCircle) {
      const Matrix u = polar_phase(model.k_rep);
      const RealVector shifted = model.dirac().matrix().diagonal().real().array() + 0.5;
      const double window = std::max(4.0, model.containment_radius / 2.0);
      const ToeplitzResult toe = toeplitz_index(u, HermitianOperator::diagonal(shifted), window);
      r.details["toeplitz_index"] = toe.index;
      r.details["toeplitz_window"] = window;
      r.agreement = toe.index == conventions.odd_sign * raw;
    } else {
      r.agreement = true;
    }
  } catch (const std::exception& e) {
    record_error(r, e);
  }
  r.wall_seconds = seconds_since(start);
  report.jobs.push_back(std::move(r));
  return report;
}

Report cmd_export(const RunConfig& config) {
  config.validate();
  Report report;
  report.command = "export";
  report.config = to_json(config);
  const ModelInstance model = build_model(config.model, BuildOptions{false});
  const auto manifest = save_model(model, config.out / "model");
  report.extra["manifest"] = manifest.string();
  for (double kappa : config.kappa) {
    const HermitianOperator l = build_localiser(model, kappa);
    for (double rho : config.rho) {
      JobRecord r;
      r.model = model.describe();
      r.kappa = kappa;
      r.rho = rho;
      r.mode = config.mode;
      const auto start = Clock::now();
      try {
        const TruncatedLocaliser t = truncate(model, l, {kappa, rho, config.mode});
        const auto file = config.out / ("localiser_kappa" + format_number(kappa) + "_rho" +
                                        format_number(rho) + ".mtx");
        mm::write_file(file, t.matrix.matrix(), mm::Layout::Coordinate, mm::Symmetry::Hermitian);
        r.details = json{{"file", file.string()}, {"rank", t.rank},
                         {"inertia", to_json(t.spectrum.inertia)}};
        r.agreement = true;
      } catch (const std::exception& e) {
        record_error(r, e);
      }
      r.wall_seconds = seconds_since(start);
      report.jobs.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace speclocal
