#include "speclocal/operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "speclocal/error.hpp"
#include "speclocal/matrix_market.hpp"

namespace speclocal {

// ---------------------------------------------------------------------------
// GradedOperator
// ---------------------------------------------------------------------------

GradedOperator::GradedOperator(HermitianOperator op, std::vector<int> grading)
    : op_(std::move(op)), grading_(std::move(grading)) {
  if (static_cast<Index>(grading_.size()) != op_.dim()) {
    fail(ErrorCode::ValidationError, "grading has length " + std::to_string(grading_.size()) +
                                         " but D has dim " + std::to_string(op_.dim()));
  }
  for (std::size_t i = 0; i < grading_.size(); ++i) {
    if (grading_[i] == 1) {
      plus_.push_back(static_cast<Index>(i));
    } else if (grading_[i] == -1) {
      minus_.push_back(static_cast<Index>(i));
    } else {
      fail(ErrorCode::ValidationError, "grading entries must be +1 or -1");
    }
  }
  const Matrix& d = op_.matrix();
  const double scale = linalg::max_abs(d);
  double worst = 0.0;
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < d.rows(); ++i) {
      const int gi = grading_[static_cast<std::size_t>(i)];
      const int gj = grading_[static_cast<std::size_t>(j)];
      // (Gamma D + D Gamma)_{ij} = (g_i + g_j) D_{ij}
      if (gi == gj) worst = std::max(worst, 2.0 * std::abs(d(i, j)));
    }
  }
  if (worst > 1e-12 * scale) {
    fail(ErrorCode::ValidationError,
         "grading anticommutation violated: max |Gamma D + D Gamma| = " + std::to_string(worst));
  }
}

Matrix GradedOperator::plus_block() const { return compress(op_.matrix(), minus_, plus_); }

Matrix GradedOperator::minus_block() const { return compress(op_.matrix(), plus_, minus_); }

HermitianOperator GradedOperator::grading_operator() const {
  RealVector g(dim());
  for (Index i = 0; i < dim(); ++i) g(i) = grading_[static_cast<std::size_t>(i)];
  return HermitianOperator::diagonal(g);
}

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::OddCircle: return "odd_circle";
    case ModelKind::EvenQwz: return "even_qwz";
    case ModelKind::EvenWeightedShift: return "even_weighted_shift";
    case ModelKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(OracleRef ref) {
  switch (ref) {
    case OracleRef::WindingNumber: return "winding_number";
    case OracleRef::ChernNumberFhs: return "chern_number_fhs";
    case OracleRef::FredholmIndexGraded: return "fredholm_index_graded";
    case OracleRef::StoredValue: return "stored_value";
  }
  return "stored_value";
}

std::string to_string(Offset offset) {
  return offset == Offset::Integer ? "integer" : "half_integer";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "odd_circle") return ModelKind::OddCircle;
  if (s == "even_qwz") return ModelKind::EvenQwz;
  if (s == "even_weighted_shift") return ModelKind::EvenWeightedShift;
  if (s == "custom") return ModelKind::Custom;
  fail(ErrorCode::FormatError, "unknown model kind '" + s + "'");
}

OracleRef parse_oracle_ref(const std::string& s) {
  if (s == "winding_number") return OracleRef::WindingNumber;
  if (s == "chern_number_fhs") return OracleRef::ChernNumberFhs;
  if (s == "fredholm_index_graded") return OracleRef::FredholmIndexGraded;
  if (s == "stored_value") return OracleRef::StoredValue;
  fail(ErrorCode::FormatError, "unknown oracle_ref '" + s + "'");
}

Offset parse_offset(const std::string& s) {
  if (s == "integer") return Offset::Integer;
  if (s == "half_integer" || s == "half") return Offset::HalfInteger;
  fail(ErrorCode::FormatError, "unknown offset '" + s + "'");
}

// ---------------------------------------------------------------------------
// ModelInstance
// ---------------------------------------------------------------------------

const HermitianOperator& ModelInstance::dirac() const {
  if (graded_dirac) return graded_dirac->op();
  if (odd_dirac) return *odd_dirac;
  fail(ErrorCode::ValidationError, "model '" + name + "' has no Dirac operator");
}

std::string ModelInstance::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case ModelKind::OddCircle: {
      os << "(M=" << params.modes << ", symbol={";
      for (std::size_t i = 0; i < params.symbol.size(); ++i) {
        const auto& t = params.symbol[i];
        os << (i ? "," : "") << "(" << t.k << "," << t.c.real();
        if (t.c.imag() != 0.0) os << (t.c.imag() > 0 ? "+" : "") << t.c.imag() << "i";
        os << ")";
      }
      os << "})";
      break;
    }
    case ModelKind::EvenQwz:
      os << "(L=" << params.box << ", m=" << params.mass << ", offset=" << to_string(params.offset)
         << ")";
      break;
    case ModelKind::EvenWeightedShift:
      os << "(N=" << params.size << ", nu=" << params.multiplicity << ", H=" << params.h_sign << ")";
      break;
    case ModelKind::Custom:
      os << "(" << name << ")";
      break;
  }
  return os.str();
}

Complex evaluate_symbol(const std::vector<SymbolTerm>& symbol, double theta) {
  Complex v{};
  for (const auto& t : symbol) v += t.c * std::polar(1.0, t.k * theta);
  return v;
}

// ---------------------------------------------------------------------------
// Circle model
// ---------------------------------------------------------------------------

ModelInstance build_circle_model(int modes, std::vector<SymbolTerm> symbol,
                                 const BuildOptions& options) {
  if (modes < 8) fail(ErrorCode::InvalidArgument, "circle model needs M >= 8");
  if (symbol.empty()) fail(ErrorCode::InvalidArgument, "circle model needs a nonempty symbol");
  int kmax = 0;
  for (const auto& t : symbol) kmax = std::max(kmax, std::abs(t.k));
  if (kmax >= modes) fail(ErrorCode::InvalidArgument, "symbol degree must be below M");

  double min_abs = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kSymbolCheckGrid; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / kSymbolCheckGrid;
    min_abs = std::min(min_abs, std::abs(evaluate_symbol(symbol, theta)));
  }
  if (min_abs < 1e-8) {
    fail(ErrorCode::SingularSymbol, "min |g(theta)| on the check grid is " + std::to_string(min_abs));
  }

  const Index dim = 2 * modes + 1;
  RealVector n(dim);
  for (Index i = 0; i < dim; ++i) n(i) = static_cast<double>(i - modes);

  Matrix g = Matrix::Zero(dim, dim);
  for (const auto& t : symbol) {
    for (Index i = 0; i < dim; ++i) {
      const Index target = ((i + t.k) % dim + dim) % dim;
      g(target, i) += t.c;
    }
  }

  ModelInstance model;
  model.kind = ModelKind::OddCircle;
  model.parity = Parity::Odd;
  model.name = "circle";
  model.params.modes = modes;
  model.params.symbol = std::move(symbol);
  model.odd_dirac = HermitianOperator::diagonal(n);
  model.k_rep = std::move(g);
  model.interior.resize(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    model.interior[static_cast<std::size_t>(i)] = std::abs(n(i)) <= modes - kmax;
  }
  model.containment_radius = modes - kmax - 2;
  model.oracle_ref = OracleRef::WindingNumber;
  const RealVector s = linalg::singular_values(model.k_rep);
  model.k_rep_norm = s(0);
  model.k_rep_gap = s(s.size() - 1);
  if (options.compute_commutator) {
    model.commutator = commutator_norm(model.odd_dirac->matrix(), model.k_rep, model.interior);
  }
  return model;
}

// ---------------------------------------------------------------------------
// QWZ model
// ---------------------------------------------------------------------------

namespace {

const Eigen::Matrix2cd& pauli(int a) {
  static const Eigen::Matrix2cd sx = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd sy =
      (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Eigen::Matrix2cd sz = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  return a == 1 ? sx : (a == 2 ? sy : sz);
}

// Hopping matrix from site s to s + e_mu.
Eigen::Matrix2cd qwz_hop(int mu) {
  return 0.5 * (pauli(3) - Complex(0.0, 1.0) * pauli(mu));
}

Index site_index(int box, int x, int y) {
  const int w = 2 * box + 1;
  const int xi = ((x + box) % w + w) % w;
  const int yi = ((y + box) % w + w) % w;
  return static_cast<Index>(xi) * w + yi;
}

}  // namespace

Matrix qwz_hamiltonian(int box, double mass) {
  const int w = 2 * box + 1;
  const Index sites = static_cast<Index>(w) * w;
  Matrix h = Matrix::Zero(2 * sites, 2 * sites);
  const Eigen::Matrix2cd hop[2] = {qwz_hop(1), qwz_hop(2)};
  for (int x = -box; x <= box; ++x) {
    for (int y = -box; y <= box; ++y) {
      const Index s = site_index(box, x, y);
      h.block<2, 2>(2 * s, 2 * s) += mass * pauli(3);
      for (int mu = 0; mu < 2; ++mu) {
        const Index t = mu == 0 ? site_index(box, x + 1, y) : site_index(box, x, y + 1);
        h.block<2, 2>(2 * t, 2 * s) += hop[mu];
        h.block<2, 2>(2 * s, 2 * t) += hop[mu].adjoint();
      }
    }
  }
  return h;
}

Eigen::Matrix2cd qwz_bloch(double mass, double kx, double ky) {
  Eigen::Matrix2cd h = mass * pauli(3);
  const double k[2] = {kx, ky};
  for (int mu = 0; mu < 2; ++mu) {
    const Eigen::Matrix2cd t = qwz_hop(mu + 1);
    const Complex phase = std::polar(1.0, -k[mu]);
    h += phase * t + std::conj(phase) * t.adjoint();
  }
  return h;
}

GradedOperator build_dual_dirac(int box, Offset offset, int internal_dim) {
  if (box < 1 || internal_dim < 1) fail(ErrorCode::InvalidArgument, "build_dual_dirac: bad sizes");
  const int w = 2 * box + 1;
  const Index sites = static_cast<Index>(w) * w;
  const Index half = sites * internal_dim;
  const double x0 = offset == Offset::HalfInteger ? 0.5 : 0.0;
  Matrix d = Matrix::Zero(2 * half, 2 * half);
  for (int x = -box; x <= box; ++x) {
    for (int y = -box; y <= box; ++y) {
      const Complex z(x - x0, y - x0);
      const Index s = site_index(box, x, y);
      for (int a = 0; a < internal_dim; ++a) {
        const Index p = s * internal_dim + a;
        d(half + p, p) = z;             // D+
        d(p, half + p) = std::conj(z);  // D-
      }
    }
  }
  std::vector<int> grading(static_cast<std::size_t>(2 * half), 1);
  std::fill(grading.begin() + half, grading.end(), -1);
  return GradedOperator(HermitianOperator(std::move(d), 0.0), std::move(grading));
}

ModelInstance build_qwz_model(int box, double mass, Offset offset, const BuildOptions& options) {
  if (box < 8) fail(ErrorCode::InvalidArgument, "QWZ model needs L >= 8");
  if (!(std::abs(mass) < 4.0)) fail(ErrorCode::InvalidArgument, "QWZ mass must lie in (-4, 4)");
  if (std::abs(mass) < 1e-9 || std::abs(std::abs(mass) - 2.0) < 1e-9) {
    fail(ErrorCode::GaplessMass, "QWZ mass " + std::to_string(mass) + " closes the bulk gap");
  }
  const Matrix h = qwz_hamiltonian(box, mass);
  const RealVector eig = linalg::eigenvalues_hermitian(h);
  const double gap = eig.cwiseAbs().minCoeff();
  if (gap < 1e-6) fail(ErrorCode::GaplessMass, "spectral gap of H is " + std::to_string(gap));

  ModelInstance model;
  model.kind = ModelKind::EvenQwz;
  model.parity = Parity::Even;
  model.name = "qwz";
  model.params.box = box;
  model.params.mass = mass;
  model.params.offset = offset;
  model.internal_dim = 2;
  model.graded_dirac = build_dual_dirac(box, offset, 2);

  const Index half = h.rows();
  model.k_rep = Matrix::Zero(2 * half, 2 * half);
  model.k_rep.topLeftCorner(half, half) = h;
  model.k_rep.bottomRightCorner(half, half) = h;
  model.k_rep_gap = gap;
  model.k_rep_norm = eig.cwiseAbs().maxCoeff();

  const int w = 2 * box + 1;
  std::vector<bool> site_interior(static_cast<std::size_t>(w) * w);
  for (int x = -box; x <= box; ++x) {
    for (int y = -box; y <= box; ++y) {
      site_interior[static_cast<std::size_t>(site_index(box, x, y))] =
          std::abs(x) <= box - 1 && std::abs(y) <= box - 1;
    }
  }
  model.interior.resize(static_cast<std::size_t>(2 * half));
  for (Index i = 0; i < 2 * half; ++i) {
    model.interior[static_cast<std::size_t>(i)] =
        site_interior[static_cast<std::size_t>((i % half) / 2)];
  }
  model.containment_radius = box - 3;
  model.oracle_ref = OracleRef::ChernNumberFhs;

  if (options.compute_commutator) {
    // [D, H (+) H] is off-diagonal; its norm is that of the block D+ H - H D+.
    const Matrix dplus = model.graded_dirac->plus_block();
    std::vector<bool> half_interior(model.interior.begin(), model.interior.begin() + half);
    model.commutator = commutator_norm_offdiagonal(dplus, h, half_interior);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Weighted shift
// ---------------------------------------------------------------------------

ModelInstance build_weighted_shift_dirac(int size, int multiplicity, int h_sign) {
  if (size < 16) fail(ErrorCode::InvalidArgument, "weighted shift needs N >= 16");
  if (multiplicity < 1) fail(ErrorCode::InvalidArgument, "weighted shift needs nu >= 1");
  if (h_sign != 1 && h_sign != -1) fail(ErrorCode::InvalidArgument, "H must be +1 or -1");

  const Index plus_dim = static_cast<Index>(multiplicity) * size;
  const Index minus_dim = static_cast<Index>(multiplicity) * (size + 1);
  const Index dim = plus_dim + minus_dim;
  Matrix d = Matrix::Zero(dim, dim);
  for (int c = 0; c < multiplicity; ++c) {
    for (int n = 0; n < size; ++n) {
      const Index from = static_cast<Index>(c) * size + n;
      const Index to = plus_dim + static_cast<Index>(c) * (size + 1) + n + 1;
      d(to, from) = static_cast<double>(n + 1);
      d(from, to) = static_cast<double>(n + 1);
    }
  }
  std::vector<int> grading(static_cast<std::size_t>(dim), 1);
  std::fill(grading.begin() + plus_dim, grading.end(), -1);

  ModelInstance model;
  model.kind = ModelKind::EvenWeightedShift;
  model.parity = Parity::Even;
  model.name = "weighted_shift";
  model.params.size = size;
  model.params.multiplicity = multiplicity;
  model.params.h_sign = h_sign;
  model.graded_dirac = GradedOperator(HermitianOperator(std::move(d), 0.0), std::move(grading));
  model.k_rep = static_cast<double>(h_sign) * Matrix::Identity(dim, dim);
  model.interior.assign(static_cast<std::size_t>(dim), true);
  model.containment_radius = size - 2;
  model.oracle_ref = OracleRef::FredholmIndexGraded;
  model.k_rep_gap = 1.0;
  model.k_rep_norm = 1.0;
  model.commutator = CommutatorNorm{0.0, 0.0};
  return model;
}

// ---------------------------------------------------------------------------
// Manifest I/O
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kDiracFile = "dirac.mtx";
constexpr const char* kKRepFile = "k_rep.mtx";
constexpr const char* kGradingFile = "grading.mtx";
constexpr const char* kInteriorFile = "interior.mtx";

Matrix vector_to_matrix(const std::vector<int>& v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Index>(i), 0) = v[i];
  return m;
}

std::vector<int> matrix_to_ints(const Matrix& m, const std::string& what) {
  if (m.cols() != 1) fail(ErrorCode::FormatError, what + " must be a single column");
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    const double v = m(i, 0).real();
    if (m(i, 0).imag() != 0.0 || v != std::round(v)) {
      fail(ErrorCode::FormatError, what + " entries must be integers");
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(v);
  }
  return out;
}

void require_key(const YAML::Node& node, const char* key) {
  if (!node[key]) fail(ErrorCode::ValidationError, std::string("manifest is missing '") + key + "'");
}

}  // namespace

std::filesystem::path save_model(const ModelInstance& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  mm::write_file(dir / kDiracFile, model.dirac().matrix(), mm::Layout::Coordinate,
                 mm::Symmetry::Hermitian);
  mm::write_file(dir / kKRepFile, model.k_rep, mm::Layout::Coordinate,
                 model.parity == Parity::Even ? mm::Symmetry::Hermitian : mm::Symmetry::General);
  if (model.graded_dirac) {
    mm::write_file(dir / kGradingFile, vector_to_matrix(model.graded_dirac->grading()),
                   mm::Layout::Array);
  }
  std::vector<int> interior(model.interior.begin(), model.interior.end());
  mm::write_file(dir / kInteriorFile, vector_to_matrix(interior), mm::Layout::Array);

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(model.kind);
  out << YAML::Key << "parity" << YAML::Value << (model.parity == Parity::Even ? "even" : "odd");
  out << YAML::Key << "name" << YAML::Value << model.name;
  out << YAML::Key << "dims" << YAML::Value << model.dim();
  out << YAML::Key << "internal_dim" << YAML::Value << model.internal_dim;
  out << YAML::Key << "dirac" << YAML::Value << kDiracFile;
  out << YAML::Key << "k_rep" << YAML::Value << kKRepFile;
  if (model.graded_dirac) out << YAML::Key << "grading" << YAML::Value << kGradingFile;
  out << YAML::Key << "interior" << YAML::Value << kInteriorFile;
  out << YAML::Key << "containment_radius" << YAML::Value << model.containment_radius;
  out << YAML::Key << "oracle_ref" << YAML::Value << to_string(model.oracle_ref);
  if (model.oracle_value) out << YAML::Key << "oracle_value" << YAML::Value << *model.oracle_value;
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  switch (model.kind) {
    case ModelKind::OddCircle:
      out << YAML::Key << "modes" << YAML::Value << model.params.modes;
      out << YAML::Key << "symbol" << YAML::Value << YAML::BeginSeq;
      for (const auto& t : model.params.symbol) {
        out << YAML::Flow << YAML::BeginSeq << t.k << t.c.real() << t.c.imag() << YAML::EndSeq;
      }
      out << YAML::EndSeq;
      break;
    case ModelKind::EvenQwz:
      out << YAML::Key << "box" << YAML::Value << model.params.box;
      out << YAML::Key << "mass" << YAML::Value << model.params.mass;
      out << YAML::Key << "offset" << YAML::Value << to_string(model.params.offset);
      break;
    case ModelKind::EvenWeightedShift:
      out << YAML::Key << "size" << YAML::Value << model.params.size;
      out << YAML::Key << "multiplicity" << YAML::Value << model.params.multiplicity;
      out << YAML::Key << "h_sign" << YAML::Value << model.params.h_sign;
      break;
    case ModelKind::Custom:
      break;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto manifest = dir / "manifest.yaml";
  std::ofstream file(manifest);
  if (!file) fail(ErrorCode::FormatError, "cannot write " + manifest.string());
  file << out.c_str() << '\n';
  return manifest;
}

ModelInstance load_model(const std::filesystem::path& manifest) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(manifest.string());
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::FormatError, "cannot parse manifest " + manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();

  try {
    require_key(root, "kind");
    require_key(root, "dirac");
    require_key(root, "k_rep");
    require_key(root, "containment_radius");

    ModelInstance model;
    model.kind = parse_model_kind(root["kind"].as<std::string>());
    model.name = root["name"] ? root["name"].as<std::string>() : manifest.stem().string();
    if (root["parity"]) {
      const auto p = root["parity"].as<std::string>();
      if (p != "even" && p != "odd") fail(ErrorCode::FormatError, "parity must be even or odd");
      model.parity = p == "even" ? Parity::Even : Parity::Odd;
    } else {
      model.parity = model.kind == ModelKind::OddCircle ? Parity::Odd : Parity::Even;
    }
    if (root["internal_dim"]) model.internal_dim = root["internal_dim"].as<int>();

    const YAML::Node params = root["params"];
    if (params) {
      if (params["modes"]) model.params.modes = params["modes"].as<int>();
      if (params["symbol"]) {
        for (const auto& term : params["symbol"]) {
          model.params.symbol.push_back(
              {term[0].as<int>(), Complex(term[1].as<double>(), term[2] ? term[2].as<double>() : 0.0)});
        }
      }
      if (params["box"]) model.params.box = params["box"].as<int>();
      if (params["mass"]) model.params.mass = params["mass"].as<double>();
      if (params["offset"]) model.params.offset = parse_offset(params["offset"].as<std::string>());
      if (params["size"]) model.params.size = params["size"].as<int>();
      if (params["multiplicity"]) model.params.multiplicity = params["multiplicity"].as<int>();
      if (params["h_sign"]) model.params.h_sign = params["h_sign"].as<int>();
    }

    Matrix d = mm::read_file(base / root["dirac"].as<std::string>());
    if (root["dims"] && root["dims"].as<long>() != d.rows()) {
      fail(ErrorCode::ValidationError, "dims does not match the Dirac matrix");
    }
    HermitianOperator dirac = [&] {
      try {
        return HermitianOperator(std::move(d));
      } catch (const Error& e) {
        fail(ErrorCode::ValidationError, std::string("Dirac operator: ") + e.what());
      }
    }();
    model.k_rep = mm::read_file(base / root["k_rep"].as<std::string>());
    if (model.k_rep.rows() != dirac.dim() || model.k_rep.cols() != dirac.dim()) {
      fail(ErrorCode::ValidationError, "K_rep dimension does not match the Dirac operator");
    }

    if (model.parity == Parity::Even) {
      if (!root["grading"]) {
        fail(ErrorCode::ValidationError, "even model requires a grading file");
      }
      auto grading = matrix_to_ints(mm::read_file(base / root["grading"].as<std::string>()), "grading");
      model.graded_dirac = GradedOperator(std::move(dirac), std::move(grading));
      HermitianOperator h = [&] {
        try {
          return HermitianOperator(model.k_rep);
        } catch (const Error& e) {
          fail(ErrorCode::ValidationError, std::string("K_rep H: ") + e.what());
        }
      }();
      model.k_rep = h.matrix();
      const RealVector eig = linalg::eigenvalues_hermitian(model.k_rep);
      model.k_rep_gap = eig.cwiseAbs().minCoeff();
      model.k_rep_norm = eig.cwiseAbs().maxCoeff();
    } else {
      model.odd_dirac = std::move(dirac);
      const RealVector s = linalg::singular_values(model.k_rep);
      model.k_rep_norm = s(0);
      model.k_rep_gap = s(s.size() - 1);
    }
    if (!(model.k_rep_gap > 1e-12 * std::max(1.0, model.k_rep_norm))) {
      fail(ErrorCode::ValidationError, "K_rep is not invertible (spectral gap " +
                                           std::to_string(model.k_rep_gap) + ")");
    }

    if (root["interior"]) {
      const auto mask = matrix_to_ints(mm::read_file(base / root["interior"].as<std::string>()), "interior");
      if (static_cast<Index>(mask.size()) != model.dim()) {
        fail(ErrorCode::ValidationError, "interior mask length does not match the Dirac operator");
      }
      model.interior.assign(mask.begin(), mask.end());
    } else {
      model.interior.assign(static_cast<std::size_t>(model.dim()), true);
    }
    model.containment_radius = root["containment_radius"].as<double>();

    if (root["oracle_value"]) model.oracle_value = root["oracle_value"].as<int>();
    if (root["oracle_ref"]) {
      model.oracle_ref = parse_oracle_ref(root["oracle_ref"].as<std::string>());
    } else if (model.oracle_value) {
      model.oracle_ref = OracleRef::StoredValue;
    } else {
      fail(ErrorCode::ValidationError, "manifest needs oracle_ref or oracle_value");
    }
    if (model.oracle_ref == OracleRef::StoredValue && !model.oracle_value) {
      fail(ErrorCode::ValidationError, "oracle_ref stored_value requires oracle_value");
    }

    if (model.parity == Parity::Even) {
      const auto& gd = *model.graded_dirac;
      const Matrix off = compress(model.k_rep, gd.minus_indices(), gd.plus_indices());
      if (linalg::max_abs(off) > 1e-12 * std::max(1.0, model.k_rep_norm)) {
        fail(ErrorCode::ValidationError, "K_rep must be even (block diagonal) w.r.t. the grading");
      }
    }
    model.commutator = commutator_norm(model.dirac().matrix(), model.k_rep, model.interior);
    return model;
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::FormatError, std::string("manifest field error: ") + e.what());
  }
}

}  // namespace speclocal
