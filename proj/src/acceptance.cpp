#include "speclocal/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "speclocal/error.hpp"
#include "speclocal/flow.hpp"
#include "speclocal/harness.hpp"
#include "speclocal/localiser.hpp"
#include "speclocal/oracles.hpp"

namespace speclocal {

using nlohmann::json;

Profile parse_profile(const std::string& s) {
  if (s == "quick") return Profile::Quick;
  if (s == "full") return Profile::Full;
  fail(ErrorCode::ConfigError, "profile must be quick or full, got '" + s + "'");
}

std::string to_string(Profile profile) { return profile == Profile::Quick ? "quick" : "full"; }

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kTitles[kCriterionCount] = {
    "odd pairing, strict regime",      "odd pairing, permissive sweep",
    "even pairing with index correction", "even pairing, Chern model",
    "gap certificates",                "spectral-flow consistency",
    "parameter and box stability",     "chi independence",
    "spectral-projection identity",    "relative-index endpoints",
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

struct Job {
  std::string label;
  std::size_t model = 0;  // index into Stage::models
  LocaliserParams params;
  std::optional<PairingResult> result;
  long expected = 0;
  std::string error;
  double seconds = 0.0;

  bool agrees() const { return result && result->value == expected; }
  const Certificate* certificate(const std::string& name) const {
    if (!result) return nullptr;
    for (const auto& c : result->certificates) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct Stage {
  std::vector<ModelInstance> models;
  std::vector<std::string> model_labels;
  std::vector<long> raw;
  std::vector<Job> jobs;
  double seconds = 0.0;
  // Parameters used when this stage's models enter the flow criteria.
  std::vector<LocaliserParams> flow_params;
};

struct FlowCheck {
  std::string label;
  long crossings = 0;
  long endpoints = 0;
  long pairing = 0;
  int replaced = 0;
  std::string error;
  bool ok() const { return error.empty() && crossings == endpoints && endpoints == pairing; }
};

std::string job_error(const std::exception& e) { return e.what(); }

class Suite {
 public:
  explicit Suite(const AcceptanceOptions& options) : opt_(options) {}

  std::vector<CriterionResult> run() {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) {
      if (!opt_.only.empty() && !opt_.only.count(id)) continue;
      log("running criterion " + std::to_string(id));
      const auto start = Clock::now();
      CriterionResult r;
      r.id = id;
      try {
        r = dispatch(id);
        r.id = id;
      } catch (const std::exception& e) {
        r.id = id;
        r.title = kTitles[id - 1];
        r.passed = false;
        r.failures.push_back(std::string("unexpected error: ") + e.what());
      }
      r.seconds = seconds_since(start);
      if (!r.skipped) r.passed = r.failures.empty();
      if (r.summary.empty() && !r.failures.empty()) r.summary = r.failures.front();
      log(format_line(r));
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  const AcceptanceOptions& opt_;
  std::optional<Stage> strict_circle_, circle_sweep_, shift_, qwz_;
  std::optional<std::vector<FlowCheck>> flow_clamp_;

  void log(const std::string& line) const {
    if (opt_.log) *opt_.log << line << std::endl;
  }

  CriterionResult dispatch(int id) {
    switch (id) {
      case 1: return criterion_strict_circle();
      case 2: return criterion_circle_sweep();
      case 3: return criterion_weighted_shift();
      case 4: return criterion_qwz();
      case 5: return criterion_certificates();
      case 6: return criterion_flow();
      case 7: return criterion_stability();
      case 8: return criterion_chi();
      case 9: return criterion_projection_identity();
      case 10: return criterion_relative_index();
      default: break;
    }
    fail(ErrorCode::InvalidArgument, "unknown criterion " + std::to_string(id));
  }

  void run_jobs(Stage& stage, const PairingOptions& options) {
    kernels::for_each_index(
        stage.jobs.size(),
        [&](std::size_t i) {
          Job& job = stage.jobs[i];
          const auto start = Clock::now();
          try {
            job.result = pairing(stage.models[job.model], job.params, options);
          } catch (const std::exception& e) {
            job.error = job_error(e);
          }
          job.seconds = seconds_since(start);
        },
        Execution::Parallel, opt_.workers);
  }

  long expected(const Stage& stage, std::size_t model) const {
    return expected_pairing(stage.models[model], stage.raw[model], opt_.conventions);
  }

  // ---------------------------------------------------------------- stages

  Stage& strict_circle() {
    if (strict_circle_) return *strict_circle_;
    const auto start = Clock::now();
    Stage s;
    s.models.push_back(build_circle_model(200, {{1, Complex(1.0)}, {0, Complex(0.5)}}));
    s.model_labels.push_back("circle M=200 g=e^{it}+1/2");
    s.raw.push_back(raw_oracle(s.models[0]));
    const LocaliserParams params{1.0 / 144.0, 145.5, Mode::Strict};
    s.jobs.push_back(Job{"strict kappa=1/144 rho=145.5", 0, params, {}, expected(s, 0), {}, 0.0});
    run_jobs(s, PairingOptions{true, true});
    s.flow_params.push_back(params);
    s.seconds = seconds_since(start);
    strict_circle_ = std::move(s);
    return *strict_circle_;
  }

  Stage& circle_sweep() {
    if (circle_sweep_) return *circle_sweep_;
    const auto start = Clock::now();
    Stage s;
    for (int k : {-2, -1, 1, 2, 3}) {
      s.models.push_back(build_circle_model(60, {{k, Complex(1.0)}}));
      s.model_labels.push_back("circle M=60 k=" + std::to_string(k));
    }
    s.models.push_back(build_circle_model(60, {{1, Complex(1.0)}, {0, Complex(0.5)}}));
    s.model_labels.push_back("circle M=60 g=e^{it}+1/2");
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      s.raw.push_back(raw_oracle(s.models[m]));
      for (double kappa : {0.02, 0.05, 0.1}) {
        for (double rho : {20.5, 30.5, 40.5}) {
          s.jobs.push_back(Job{s.model_labels[m] + " kappa=" + fmt(kappa) + " rho=" + fmt(rho), m,
                               {kappa, rho, Mode::Permissive}, {}, expected(s, m), {}, 0.0});
        }
      }
      s.flow_params.push_back({0.05, 30.5, Mode::Permissive});
    }
    run_jobs(s, PairingOptions{true, true});
    s.seconds = seconds_since(start);
    circle_sweep_ = std::move(s);
    return *circle_sweep_;
  }

  Stage& shift() {
    if (shift_) return *shift_;
    const auto start = Clock::now();
    Stage s;
    for (int nu : {1, 2, 3}) {
      for (int h : {1, -1}) {
        s.models.push_back(build_weighted_shift_dirac(40, nu, h));
        s.model_labels.push_back("shift N=40 nu=" + std::to_string(nu) + " H=" + std::to_string(h));
        const std::size_t m = s.models.size() - 1;
        s.raw.push_back(raw_oracle(s.models[m]));
        s.jobs.push_back(Job{s.model_labels[m] + " kappa=0.1 rho=10.5", m,
                             {0.1, 10.5, Mode::Permissive}, {}, expected(s, m), {}, 0.0});
        s.flow_params.push_back({0.1, 10.5, Mode::Permissive});
      }
    }
    run_jobs(s, PairingOptions{true, true});
    s.seconds = seconds_since(start);
    shift_ = std::move(s);
    return *shift_;
  }

  Stage& qwz() {
    if (qwz_) return *qwz_;
    const auto start = Clock::now();
    Stage s;
    const std::vector<double> masses{-1.0, 1.0, 3.0};
    const std::vector<Offset> offsets{Offset::HalfInteger, Offset::Integer};
    std::vector<std::pair<double, Offset>> specs;
    for (double m : masses) {
      for (Offset o : offsets) specs.emplace_back(m, o);
    }
    s.models.resize(specs.size());
    kernels::for_each_index(
        specs.size(),
        [&](std::size_t i) { s.models[i] = build_qwz_model(12, specs[i].first, specs[i].second); },
        Execution::Parallel, opt_.workers);
    std::map<double, long> chern;
    for (double m : masses) chern[m] = chern_number_fhs(qwz_bloch_function(m));
    for (std::size_t i = 0; i < specs.size(); ++i) {
      s.model_labels.push_back("qwz L=12 m=" + fmt(specs[i].first) + " offset=" +
                               to_string(specs[i].second));
      s.raw.push_back(chern[specs[i].first]);
      s.flow_params.push_back({0.5, 8.5, Mode::Permissive});
    }
    const std::vector<double> kappas{0.25, 0.5, 1.0};
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      for (double kappa : kappas) {
        for (double rho : {6.5, 8.5}) {
          s.jobs.push_back(Job{s.model_labels[m] + " kappa=" + fmt(kappa) + " rho=" + fmt(rho), m,
                               {kappa, rho, Mode::Permissive}, {}, expected(s, m), {}, 0.0});
        }
      }
    }
    run_jobs(s, PairingOptions{false, false});

    // The untruncated certificate depends on (model, kappa) only.
    const std::size_t n_full = s.models.size() * kappas.size();
    std::vector<std::optional<Certificate>> full(n_full);
    kernels::for_each_index(
        n_full,
        [&](std::size_t i) {
          try {
            full[i] = validate_infinite_regime(s.models[i / kappas.size()],
                                               kappas[i % kappas.size()], Mode::Permissive);
          } catch (const std::exception&) {
          }
        },
        Execution::Parallel, opt_.workers);
    for (auto& job : s.jobs) {
      const std::size_t k = static_cast<std::size_t>(
          std::find(kappas.begin(), kappas.end(), job.params.kappa) - kappas.begin());
      const auto& cert = full[job.model * kappas.size() + k];
      if (job.result && cert) job.result->certificates.push_back(*cert);
    }
    s.seconds = seconds_since(start);
    qwz_ = std::move(s);
    return *qwz_;
  }

  // ------------------------------------------------------------- criteria

  static void check_jobs(const Stage& s, CriterionResult& r) {
    for (const auto& job : s.jobs) {
      if (!job.error.empty()) {
        r.failures.push_back(job.label + ": " + job.error);
      } else if (!job.agrees()) {
        r.failures.push_back(job.label + ": pairing " + std::to_string(job.result->value) +
                             " vs oracle " + std::to_string(job.expected));
      }
    }
  }

  static json jobs_json(const Stage& s) {
    json arr = json::array();
    for (const auto& job : s.jobs) {
      json j{{"job", job.label},
             {"kappa", job.params.kappa},
             {"rho", job.params.rho},
             {"mode", to_string(job.params.mode)},
             {"expected", job.expected},
             {"seconds", job.seconds}};
      if (job.result) {
        j["pairing"] = job.result->value;
        j["signature"] = job.result->signature;
        j["index_correction"] = job.result->index_correction;
        j["rank"] = job.result->rank;
        j["truncated_gap"] = job.result->truncated_gap;
        json certs = json::array();
        for (const auto& c : job.result->certificates) certs.push_back(to_json(c));
        j["certificates"] = certs;
      } else {
        j["error"] = job.error;
      }
      arr.push_back(j);
    }
    return arr;
  }

  CriterionResult criterion_strict_circle() {
    CriterionResult r;
    r.title = "odd pairing, strict regime";
    const Stage& s = strict_circle();
    check_jobs(s, r);
    const Job& job = s.jobs.front();
    if (job.result) {
      if (std::abs(job.result->value) != 1) r.failures.push_back("pairing magnitude is not 1");
      const Certificate* gap = job.certificate("truncated_gap");
      if (!gap || !gap->holds || job.result->truncated_gap < 0.25) {
        r.failures.push_back("truncated gap below 0.25");
      }
      r.summary = "1/2 Sig = " + std::to_string(job.result->value) + ", oracle " +
                  std::to_string(job.expected) + ", rank " + std::to_string(job.result->rank) +
                  ", truncated gap " + fmt(job.result->truncated_gap) + " >= 0.25";
    }
    if (s.seconds >= 30.0) r.failures.push_back("runtime " + fmt(s.seconds) + " s exceeds 30 s");
    r.data["jobs"] = jobs_json(s);
    r.data["stage_seconds"] = s.seconds;
    return r;
  }

  CriterionResult criterion_circle_sweep() {
    CriterionResult r;
    r.title = "odd pairing, permissive sweep";
    const Stage& s = circle_sweep();
    check_jobs(s, r);
    std::size_t winding_jobs = 0, agreeing = 0;
    for (const auto& job : s.jobs) {
      if (s.model_labels[job.model].find(" k=") == std::string::npos) continue;
      ++winding_jobs;
      agreeing += job.agrees() ? 1 : 0;
    }
    if (winding_jobs != 45) r.failures.push_back("expected 45 winding jobs");
    if (s.seconds >= 120.0) r.failures.push_back("runtime " + fmt(s.seconds) + " s exceeds 120 s");
    r.summary = std::to_string(agreeing) + "/" + std::to_string(winding_jobs) +
                " winding jobs agree (+" + std::to_string(s.jobs.size() - winding_jobs) +
                " jobs for e^{it}+1/2) in " + fmt(s.seconds) + " s";
    r.data["jobs"] = jobs_json(s);
    return r;
  }

  CriterionResult criterion_weighted_shift() {
    CriterionResult r;
    r.title = "even pairing with index correction";
    const Stage& s = shift();
    check_jobs(s, r);
    for (const auto& job : s.jobs) {
      if (!job.result) continue;
      const ModelInstance& m = s.models[job.model];
      const long nu = m.params.multiplicity;
      const long want_pairing = m.params.h_sign == 1 ? -nu : 0;
      const long want_sig = m.params.h_sign == 1 ? -nu : nu;
      if (job.result->value != want_pairing) {
        r.failures.push_back(job.label + ": pairing " + std::to_string(job.result->value) +
                             " != " + std::to_string(want_pairing));
      }
      if (job.result->signature != want_sig) {
        r.failures.push_back(job.label + ": Sig " + std::to_string(job.result->signature) +
                             " != " + std::to_string(want_sig));
      }
      if (job.result->index_correction != -nu) {
        r.failures.push_back(job.label + ": Index(D+) " +
                             std::to_string(job.result->index_correction));
      }
    }
    if (s.seconds >= 10.0) r.failures.push_back("runtime " + fmt(s.seconds) + " s exceeds 10 s");
    r.summary = std::to_string(s.jobs.size()) + " jobs; Sig(L(+1)) = -nu, Sig(L(-1)) = +nu, "
                "pairing = -nu [H=+1] in " + fmt(s.seconds) + " s";
    r.data["jobs"] = jobs_json(s);
    return r;
  }

  static bool endpoint_holds(const Job& job) {
    const Certificate* c = job.certificate("endpoint");
    return c && c->holds;
  }

  CriterionResult criterion_qwz() {
    CriterionResult r;
    r.title = "even pairing, Chern model";
    const Stage& s = qwz();
    std::size_t passing = 0, agreeing = 0, off_grid_agree = 0, off_grid = 0;
    std::map<std::pair<double, Offset>, std::set<long>> values;
    for (const auto& job : s.jobs) {
      const ModelInstance& m = s.models[job.model];
      if (!job.error.empty()) {
        r.failures.push_back(job.label + ": " + job.error);
        continue;
      }
      if (!endpoint_holds(job)) {
        ++off_grid;
        off_grid_agree += job.agrees() ? 1 : 0;
        continue;
      }
      ++passing;
      values[{m.params.mass, m.params.offset}].insert(job.result->value);
      if (job.agrees()) {
        ++agreeing;
      } else {
        r.failures.push_back(job.label + ": pairing " + std::to_string(job.result->value) +
                             " vs oracle " + std::to_string(job.expected));
      }
    }
    auto value_of = [&](double mass, Offset o) -> std::optional<long> {
      const auto it = values.find({mass, o});
      if (it == values.end() || it->second.size() != 1) return std::nullopt;
      return *it->second.begin();
    };
    for (Offset o : {Offset::HalfInteger, Offset::Integer}) {
      const auto p1 = value_of(1.0, o), pm1 = value_of(-1.0, o), p3 = value_of(3.0, o);
      if (!p1 || !pm1 || !p3) {
        r.failures.push_back("no unique pairing per mass for offset " + to_string(o));
        continue;
      }
      if (std::abs(*p1) != 1 || *pm1 != -*p1) r.failures.push_back("m = +-1 values are not +-1 and opposite");
      if (*p3 != 0) r.failures.push_back("m = 3 pairing is not 0");
    }
    for (double mass : {-1.0, 1.0, 3.0}) {
      if (value_of(mass, Offset::HalfInteger) != value_of(mass, Offset::Integer)) {
        r.failures.push_back("offsets disagree for m = " + fmt(mass));
      }
    }
    if (s.seconds >= 300.0) r.failures.push_back("runtime " + fmt(s.seconds) + " s exceeds 300 s");
    std::ostringstream os;
    os << agreeing << "/" << passing << " jobs with kappa rho > ||H|| agree with FHS";
    for (double mass : {-1.0, 1.0, 3.0}) {
      const auto v = value_of(mass, Offset::HalfInteger);
      os << ", m=" << mass << ": " << (v ? std::to_string(*v) : "?");
    }
    os << " (" << off_grid_agree << "/" << off_grid << " further jobs also agree) in "
       << fmt(s.seconds) << " s";
    r.summary = os.str();
    r.data["jobs"] = jobs_json(s);
    return r;
  }

  CriterionResult criterion_certificates() {
    CriterionResult r;
    r.title = "gap certificates";
    std::size_t full_checked = 0, strict_checked = 0, full_skipped = 0;
    for (Stage* s : {&strict_circle(), &circle_sweep(), &shift(), &qwz()}) {
      for (const auto& job : s->jobs) {
        if (!job.result) {
          r.failures.push_back(job.label + ": no result (" + job.error + ")");
          continue;
        }
        for (const auto& c : job.result->certificates) {
          const bool full_box = c.name == "full_box_gap";
          const bool strict_gap = job.params.mode == Mode::Strict &&
                                  (c.name == "truncated_gap" || c.name == "complement_gap");
          if (full_box && std::isnan(c.measured)) {
            ++full_skipped;
            continue;
          }
          if (!full_box && !strict_gap) continue;
          (full_box ? full_checked : strict_checked)++;
          if (!c.holds) {
            r.failures.push_back(job.label + ": " + c.name + " " + fmt(c.measured) + " < " +
                                 fmt(c.bound));
          }
        }
      }
    }
    r.summary = std::to_string(full_checked) + " untruncated-gap certificates (" +
                std::to_string(full_skipped) + " jobs with kappa >= g^2 / ||[D,H]||), " +
                std::to_string(strict_checked) + " strict truncated/complement certificates, " +
                std::to_string(r.failures.size()) + " violations";
    return r;
  }

  std::vector<FlowCheck> flow_checks(const ChiPair& chi) {
    struct Item {
      const Stage* stage;
      std::size_t model;
      long pairing;
      std::string label;
    };
    std::vector<Item> items;
    for (Stage* s : {&strict_circle(), &circle_sweep(), &shift(), &qwz()}) {
      for (std::size_t m = 0; m < s->models.size(); ++m) {
        const LocaliserParams& p = s->flow_params[m];
        std::optional<long> value;
        for (const auto& job : s->jobs) {
          if (job.model == m && job.params.kappa == p.kappa && job.params.rho == p.rho &&
              job.result) {
            value = job.result->value;
          }
        }
        items.push_back({s, m, value.value_or(std::numeric_limits<long>::min()),
                         s->model_labels[m] + " kappa=" + fmt(p.kappa) + " rho=" + fmt(p.rho)});
      }
    }
    std::vector<FlowCheck> out(items.size());
    const auto grid = uniform_grid(-1.0, 1.0, kDefaultGridPoints);
    kernels::for_each_index(
        items.size(),
        [&](std::size_t i) {
          const Item& it = items[i];
          FlowCheck& f = out[i];
          f.label = it.label;
          f.pairing = it.pairing;
          try {
            const LocaliserParams& p = it.stage->flow_params[it.model];
            const OperatorPath path =
                suspension(it.stage->models[it.model], p.kappa, chi, grid, p.rho);
            SfOptions sf_opt;
            sf_opt.execution = Execution::Serial;
            const SfResult sf = sf_crossings(path, sf_opt);
            f.crossings = sf.value;
            f.replaced = sf.replaced_samples;
            f.endpoints = sf_endpoints(path.evaluate(-1.0), path.evaluate(1.0));
          } catch (const std::exception& e) {
            f.error = e.what();
          }
        },
        Execution::Parallel, opt_.workers);
    return out;
  }

  static json flow_json(const std::vector<FlowCheck>& checks) {
    json arr = json::array();
    for (const auto& f : checks) {
      arr.push_back(json{{"model", f.label},
                         {"sf_crossings", f.crossings},
                         {"sf_endpoints", f.endpoints},
                         {"pairing", f.pairing},
                         {"replaced_samples", f.replaced},
                         {"error", f.error}});
    }
    return arr;
  }

  CriterionResult criterion_flow() {
    CriterionResult r;
    r.title = "spectral-flow consistency";
    if (!flow_clamp_) flow_clamp_ = flow_checks(ChiPair::clamp());
    for (const auto& f : *flow_clamp_) {
      if (!f.ok()) {
        r.failures.push_back(f.label + ": crossings " + std::to_string(f.crossings) + ", endpoints " +
                             std::to_string(f.endpoints) + ", pairing " + std::to_string(f.pairing) +
                             (f.error.empty() ? "" : " (" + f.error + ")"));
      }
    }
    std::mt19937_64 rng(opt_.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> dim_dist(2, 60);
    auto random_hermitian = [&](int n) {
      for (;;) {
        Matrix a(n, n);
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < n; ++i) a(i, j) = Complex(normal(rng), normal(rng));
        }
        HermitianOperator h(Matrix(0.5 * (a + a.adjoint())));
        if (spectral_gap(h) > 1e-3 * operator_norm(h)) return h;
      }
    };
    int random_ok = 0;
    json random = json::array();
    for (int trial = 0; trial < 50; ++trial) {
      const int n = dim_dist(rng);
      const HermitianOperator a = random_hermitian(n);
      const HermitianOperator b = random_hermitian(n);
      try {
        const long crossings = sf_crossings(straight_line(a, b)).value;
        const long ends = sf_endpoints(a, b);
        random.push_back(json{{"dim", n}, {"sf_crossings", crossings}, {"sf_endpoints", ends}});
        if (crossings == ends) {
          ++random_ok;
        } else {
          r.failures.push_back("random path " + std::to_string(trial) + " (dim " +
                               std::to_string(n) + "): " + std::to_string(crossings) + " vs " +
                               std::to_string(ends));
        }
      } catch (const std::exception& e) {
        r.failures.push_back("random path " + std::to_string(trial) + ": " + e.what());
      }
    }
    std::size_t ok = 0;
    for (const auto& f : *flow_clamp_) ok += f.ok() ? 1 : 0;
    r.summary = std::to_string(ok) + "/" + std::to_string(flow_clamp_->size()) +
                " suspension paths with crossings = endpoints = pairing; " +
                std::to_string(random_ok) + "/50 random straight-line paths agree";
    r.data["suspensions"] = flow_json(*flow_clamp_);
    r.data["random_paths"] = random;
    r.data["seed"] = opt_.seed;
    return r;
  }

  CriterionResult criterion_stability() {
    CriterionResult r;
    r.title = "parameter and box stability";
    std::size_t groups = 0;
    auto constant = [&](const Stage& s, bool (*include)(const Job&)) {
      for (std::size_t m = 0; m < s.models.size(); ++m) {
        std::set<long> values;
        for (const auto& job : s.jobs) {
          if (job.model != m || !include(job)) continue;
          if (!job.result) {
            r.failures.push_back(job.label + ": " + job.error);
            continue;
          }
          values.insert(job.result->value);
        }
        ++groups;
        if (values.size() != 1) r.failures.push_back(s.model_labels[m] + ": pairing varies over the grid");
      }
    };
    constant(circle_sweep(), [](const Job&) { return true; });
    constant(qwz(), [](const Job& j) { return endpoint_holds(j); });

    Stage shift_grid;
    for (int nu : {1, 2}) {
      for (int h : {1, -1}) {
        shift_grid.models.push_back(build_weighted_shift_dirac(40, nu, h));
        shift_grid.model_labels.push_back("shift N=40 nu=" + std::to_string(nu) +
                                          " H=" + std::to_string(h));
        const std::size_t m = shift_grid.models.size() - 1;
        for (double kappa : {0.05, 0.1, 0.2}) {
          for (double rho : {5.5, 10.5, 20.5}) {
            shift_grid.jobs.push_back(Job{shift_grid.model_labels[m] + " kappa=" + fmt(kappa) +
                                              " rho=" + fmt(rho),
                                          m, {kappa, rho, Mode::Permissive}, {}, 0, {}, 0.0});
          }
        }
      }
    }
    run_jobs(shift_grid, PairingOptions{false, false});
    constant(shift_grid, [](const Job&) { return true; });

    std::size_t box_checks = 0;
    if (opt_.profile == Profile::Full) {
      struct BoxCase {
        std::string label;
        std::function<ModelInstance()> build;
        LocaliserParams params;
        long reference;
      };
      std::vector<BoxCase> cases;
      const Stage& sc = strict_circle();
      cases.push_back({"circle M=300 g=e^{it}+1/2 strict",
                       [] { return build_circle_model(300, {{1, Complex(1.0)}, {0, Complex(0.5)}}); },
                       sc.flow_params[0], sc.jobs[0].result ? sc.jobs[0].result->value : 0});
      const Stage& cs = circle_sweep();
      for (std::size_t m = 0; m < cs.models.size(); ++m) {
        const auto symbol = cs.models[m].params.symbol;
        cases.push_back({cs.model_labels[m] + " -> M=90",
                         [symbol] { return build_circle_model(90, symbol); }, cs.flow_params[m],
                         reference_value(cs, m)});
      }
      const Stage& ss = shift();
      for (std::size_t m = 0; m < ss.models.size(); ++m) {
        const auto p = ss.models[m].params;
        cases.push_back({ss.model_labels[m] + " -> N=60",
                         [p] { return build_weighted_shift_dirac(60, p.multiplicity, p.h_sign); },
                         ss.flow_params[m], reference_value(ss, m)});
      }
      const Stage& qs = qwz();
      for (std::size_t m = 0; m < qs.models.size(); ++m) {
        const auto p = qs.models[m].params;
        cases.push_back({qs.model_labels[m] + " -> L=18",
                         [p] { return build_qwz_model(18, p.mass, p.offset, BuildOptions{false}); },
                         qs.flow_params[m], reference_value(qs, m)});
      }
      std::vector<std::string> errors(cases.size());
      std::vector<long> values(cases.size(), 0);
      kernels::for_each_index(
          cases.size(),
          [&](std::size_t i) {
            try {
              const ModelInstance model = cases[i].build();
              values[i] = pairing(model, cases[i].params, PairingOptions{false, false}).value;
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          },
          Execution::Parallel, opt_.workers);
      json box = json::array();
      for (std::size_t i = 0; i < cases.size(); ++i) {
        ++box_checks;
        box.push_back(json{{"case", cases[i].label}, {"pairing", values[i]},
                           {"reference", cases[i].reference}, {"error", errors[i]}});
        if (!errors[i].empty()) {
          r.failures.push_back(cases[i].label + ": " + errors[i]);
        } else if (values[i] != cases[i].reference) {
          r.failures.push_back(cases[i].label + ": " + std::to_string(values[i]) + " vs " +
                               std::to_string(cases[i].reference));
        }
      }
      r.data["box_stability"] = box;
    }
    r.summary = std::to_string(groups) + " (kappa, rho) grids constant; " +
                (opt_.profile == Profile::Full
                     ? std::to_string(box_checks) + " enlarged boxes unchanged"
                     : std::string("box stability runs in the full profile"));
    return r;
  }

  static long reference_value(const Stage& s, std::size_t m) {
    const LocaliserParams& p = s.flow_params[m];
    for (const auto& job : s.jobs) {
      if (job.model == m && job.params.kappa == p.kappa && job.params.rho == p.rho && job.result) {
        return job.result->value;
      }
    }
    return std::numeric_limits<long>::min();
  }

  CriterionResult criterion_chi() {
    CriterionResult r;
    r.title = "chi independence";
    if (opt_.profile == Profile::Quick) {
      r.skipped = true;
      r.passed = true;
      r.summary = "smooth chi sweep runs in the full profile";
      return r;
    }
    if (!flow_clamp_) flow_clamp_ = flow_checks(ChiPair::clamp());
    const auto smooth = flow_checks(ChiPair::smooth());
    for (std::size_t i = 0; i < smooth.size(); ++i) {
      const auto& a = (*flow_clamp_)[i];
      const auto& b = smooth[i];
      if (!b.error.empty()) {
        r.failures.push_back(b.label + ": " + b.error);
      } else if (a.crossings != b.crossings || a.endpoints != b.endpoints || !b.ok()) {
        r.failures.push_back(b.label + ": clamp " + std::to_string(a.crossings) + " vs smooth " +
                             std::to_string(b.crossings));
      }
    }
    r.summary = std::to_string(smooth.size()) +
                " suspension flows identical under the clamp and smooth chi pairs";
    r.data["smooth"] = flow_json(smooth);
    return r;
  }

  Matrix random_complex(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) a(i, j) = Complex(normal(rng), normal(rng));
    }
    return a;
  }

  CriterionResult criterion_projection_identity() {
    CriterionResult r;
    r.title = "spectral-projection identity";
    std::mt19937_64 rng(opt_.seed + 9);
    std::uniform_int_distribution<int> dim_dist(1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = dim_dist(rng);
      Matrix g;
      do {
        g = random_complex(rng, n, n);
      } while (spectral_gap(g) < 1e-3);
      Matrix block = Matrix::Zero(2 * n, 2 * n);
      block.topRightCorner(n, n) = g;
      block.bottomLeftCorner(n, n) = g.adjoint();
      const Projection p = positive_spectral_projection(HermitianOperator(block));
      const Matrix u = polar_phase(g);
      Matrix target(2 * n, 2 * n);
      target << Matrix::Identity(n, n), u, u.adjoint(), Matrix::Identity(n, n);
      target *= 0.5;
      const double err = operator_norm(Matrix(p.matrix() - target));
      worst = std::max(worst, err);
      if (err > 1e-9) {
        r.failures.push_back("trial " + std::to_string(trial) + ": deviation " + fmt(err));
      }
      std::vector<int> grading(static_cast<std::size_t>(2 * n), 1);
      std::fill(grading.begin() + n, grading.end(), -1);
      const Matrix up = odd_projection_unitary(p, grading);
      if (operator_norm(Matrix(up - u.adjoint())) > 1e-9) {
        r.failures.push_back("trial " + std::to_string(trial) + ": U_P differs from u*");
      }
    }
    r.summary = "20 random G, max deviation " + fmt(worst) + " <= 1e-9";
    r.data["max_deviation"] = worst;
    return r;
  }

  CriterionResult criterion_relative_index() {
    CriterionResult r;
    r.title = "relative-index endpoints";
    std::mt19937_64 rng(opt_.seed + 10);
    std::uniform_int_distribution<int> dim_dist(1, 12);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    const ChiPair chi = ChiPair::clamp();
    json trials = json::array();
    for (int trial = 0; trial < 20; ++trial) {
      const int n = dim_dist(rng);
      const int rank = std::uniform_int_distribution<int>(0, n)(rng);
      const Eigen::HouseholderQR<Matrix> qr(random_complex(rng, n, n));
      const Matrix q = qr.householderQ();
      RealVector lambda(n);
      for (int i = 0; i < n; ++i) lambda(i) = (i < rank ? 1.0 : -1.0) * mag(rng);
      const Matrix h = q * lambda.cast<Complex>().asDiagonal() * q.adjoint();
      auto s_h = [&](double t) {
        return HermitianOperator(Matrix(-chi.minus(t) * Matrix::Identity(n, n) + chi.plus(t) * h));
      };
      const Projection top = positive_spectral_projection(s_h(1.0));
      const Projection bottom = positive_spectral_projection(s_h(-1.0));
      const long value = relative_index_projections(top, bottom);
      trials.push_back(json{{"dim", n}, {"rank_p", rank}, {"relind", value}});
      if (value != rank) {
        r.failures.push_back("trial " + std::to_string(trial) + ": relind " + std::to_string(value) +
                             " != rank p " + std::to_string(rank));
      }
    }
    r.summary = "20 random (H, p): relind(P(S_H(1)), P(S_H(-1))) = rank p";
    r.data["trials"] = trials;
    return r;
  }
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  if (options.conventions.even_sign == 0 || options.conventions.odd_sign == 0) {
    fail(ErrorCode::ConfigError, "acceptance run needs loaded sign conventions");
  }
  Suite suite(options);
  return suite.run();
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL")) << " criterion " << r.id << " ("
     << r.title << "): " << r.summary << " [" << std::fixed << std::setprecision(1) << r.seconds
     << " s]";
  if (!r.passed) {
    for (const auto& f : r.failures) os << "\n    - " << f;
  }
  return os.str();
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  AcceptanceOptions a;
  a.profile = options.profile;
  a.only = options.only;
  a.conventions = load_conventions(options.conventions.empty() ? default_conventions_path()
                                                               : options.conventions);
  a.seed = options.seed;
  a.workers = options.workers;
  const auto results = run_acceptance(a);
  bool ok = true;
  json report{{"profile", to_string(options.profile)},
              {"seed", options.seed},
              {"conventions", json{{"even_sign", a.conventions.even_sign},
                                   {"odd_sign", a.conventions.odd_sign}}},
              {"criteria", json::array()}};
  for (const auto& r : results) {
    out << format_line(r) << std::endl;
    ok = ok && r.passed;
    report["criteria"].push_back(json{{"id", r.id},
                                      {"title", r.title},
                                      {"passed", r.passed},
                                      {"skipped", r.skipped},
                                      {"summary", r.summary},
                                      {"failures", r.failures},
                                      {"seconds", r.seconds},
                                      {"data", r.data}});
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << (ok ? "verify: all " : "verify: ") << passed << "/" << results.size()
      << " criteria passed" << '\n';
  report["passed"] = ok;
  if (!options.out.empty()) {
    std::filesystem::create_directories(options.out);
    std::ofstream file(options.out / "verify.json");
    file << std::setw(2) << report << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace speclocal
