#include "speclocal/conventions.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "speclocal/error.hpp"
#include "speclocal/localiser.hpp"
#include "speclocal/oracles.hpp"

namespace speclocal {

std::filesystem::path default_conventions_path() {
  if (const char* env = std::getenv("SPECLOCAL_CONVENTIONS"); env && *env) return env;
  return std::filesystem::path(SPECLOCAL_SOURCE_DIR) / "conventions.txt";
}

namespace {

int parse_sign(const std::string& key, const std::string& value) {
  if (value == "+1" || value == "1") return 1;
  if (value == "-1") return -1;
  fail(ErrorCode::ConfigError, key + " must be +1 or -1, got '" + value + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Conventions load_conventions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open convention file " + path.string());
  Conventions c;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      c.notes += trim(line.substr(hash + 1)) + "\n";
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "malformed line '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "even_sign") {
      c.even_sign = parse_sign(key, value);
    } else if (key == "odd_sign") {
      c.odd_sign = parse_sign(key, value);
    } else {
      fail(ErrorCode::ConfigError, "unknown key '" + key + "' in convention file");
    }
  }
  if (c.even_sign == 0 || c.odd_sign == 0) {
    fail(ErrorCode::ConfigError, "convention file must define even_sign and odd_sign");
  }
  return c;
}

void save_conventions(const std::filesystem::path& path, const Conventions& c) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + path.string());
  std::istringstream notes(c.notes);
  std::string line;
  while (std::getline(notes, line)) out << "# " << line << '\n';
  out << "even_sign = " << (c.even_sign > 0 ? "+1" : "-1") << '\n';
  out << "odd_sign = " << (c.odd_sign > 0 ? "+1" : "-1") << '\n';
}

ConventionDerivation derive_conventions() {
  ConventionDerivation d;
  const ModelInstance circle = build_circle_model(60, {{1, Complex(1.0)}});
  d.circle_pairing = pairing_odd(circle, {0.05, 30.5, Mode::Permissive}, {false, false}).value;
  d.circle_oracle = raw_oracle(circle);

  const ModelInstance qwz = build_qwz_model(12, 1.0, Offset::HalfInteger);
  d.qwz_pairing = pairing_even(qwz, {0.5, 8.5, Mode::Permissive}, {false, false}).value;
  d.qwz_oracle = raw_oracle(qwz);

  auto sign = [](long pairing, long oracle, const char* what) {
    if (oracle == 0 || (pairing != oracle && pairing != -oracle)) {
      std::ostringstream os;
      os << what << ": pairing " << pairing << " and oracle " << oracle
         << " do not determine a sign";
      fail(ErrorCode::ValidationError, os.str());
    }
    return pairing == oracle ? 1 : -1;
  };
  d.conventions.odd_sign = sign(d.circle_pairing, d.circle_oracle, "circle model");
  d.conventions.even_sign = sign(d.qwz_pairing, d.qwz_oracle, "QWZ model");

  std::ostringstream notes;
  notes << "Sign conventions: pairing = sign * raw oracle value.\n"
        << "odd_sign: circle model M=60, g(theta)=e^{i theta}, kappa=0.05, rho=30.5: "
        << "1/2 Sig = " << d.circle_pairing << ", winding number = " << d.circle_oracle << "\n"
        << "even_sign: QWZ L=12, m=1, half-integer offset, kappa=0.5, rho=8.5: "
        << "1/2 Sig + 1/2 Index = " << d.qwz_pairing << ", FHS Chern number = " << d.qwz_oracle
        << "\n"
        << "Regenerate with: speclocal oracle --derive-conventions";
  d.conventions.notes = notes.str();
  return d;
}

long expected_pairing(const ModelInstance& model, long raw, const Conventions& c) {
  return (model.parity == Parity::Even ? c.even_sign : c.odd_sign) * raw;
}

}  // namespace speclocal
