#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "speclocal/spectral_core.hpp"

namespace speclocal {

/// Odd self-adjoint operator D = [[0, D-], [D+, 0]] with respect to a
/// diagonal +-1 grading. Gamma^2 = 1 holds by construction; the
/// anticommutation Gamma D + D Gamma = 0 is checked to 1e-12 ||D||.
class GradedOperator {
 public:
  GradedOperator(HermitianOperator op, std::vector<int> grading);

  const HermitianOperator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  const std::vector<int>& grading() const noexcept { return grading_; }
  Index dim() const noexcept { return op_.dim(); }

  const std::vector<Index>& plus_indices() const noexcept { return plus_; }
  const std::vector<Index>& minus_indices() const noexcept { return minus_; }

  /// D+ : H+ -> H-  (rows indexed by minus_indices, columns by plus_indices).
  Matrix plus_block() const;
  /// D- = (D+)^* : H- -> H+.
  Matrix minus_block() const;
  HermitianOperator grading_operator() const;

 private:
  HermitianOperator op_;
  std::vector<int> grading_;
  std::vector<Index> plus_;
  std::vector<Index> minus_;
};

enum class ModelKind { OddCircle, EvenQwz, EvenWeightedShift, Custom };
enum class Parity { Even, Odd };
enum class OracleRef { WindingNumber, ChernNumberFhs, FredholmIndexGraded, StoredValue };
enum class Offset { Integer, HalfInteger };

std::string to_string(ModelKind kind);
std::string to_string(OracleRef ref);
std::string to_string(Offset offset);
ModelKind parse_model_kind(const std::string& s);
OracleRef parse_oracle_ref(const std::string& s);
Offset parse_offset(const std::string& s);

/// One Fourier coefficient c_k of a circle symbol g(theta) = sum_k c_k e^{ik theta}.
struct SymbolTerm {
  int k = 0;
  Complex c{};
};

Complex evaluate_symbol(const std::vector<SymbolTerm>& symbol, double theta);

struct ModelParams {
  // odd_circle
  int modes = 0;
  std::vector<SymbolTerm> symbol;
  // even_qwz
  int box = 0;
  double mass = 0.0;
  Offset offset = Offset::HalfInteger;
  // even_weighted_shift
  int size = 0;
  int multiplicity = 0;
  int h_sign = 1;
};

/// A packaged (D, K-theory representative) pair. Immutable once built.
///
/// For even models `k_rep` is the representative H already acting on the
/// whole graded Hilbert space (pi(H) = pi+(H) (+) pi-(H)); for odd models it is
/// the invertible G acting on the space of D.
struct ModelInstance {
  ModelKind kind = ModelKind::Custom;
  Parity parity = Parity::Even;
  std::string name;
  ModelParams params;

  std::optional<GradedOperator> graded_dirac;  // even models
  std::optional<HermitianOperator> odd_dirac;  // odd models
  Matrix k_rep;

  /// Basis indices (of the space of D) whose couplings never cross the
  /// periodic seam or the box boundary.
  std::vector<bool> interior;
  double containment_radius = 0.0;

  OracleRef oracle_ref = OracleRef::StoredValue;
  std::optional<int> oracle_value;

  double k_rep_gap = 0.0;   // g
  double k_rep_norm = 0.0;  // ||H|| or ||G||
  std::optional<CommutatorNorm> commutator;  // ||[D, H]|| or ||[D, G]||

  /// Representation multiplicity n (internal dimension per lattice site).
  int internal_dim = 1;

  const HermitianOperator& dirac() const;
  Index dim() const { return dirac().dim(); }
  std::string describe() const;
};

struct BuildOptions {
  bool compute_commutator = true;
};

inline constexpr int kSymbolCheckGrid = 4096;

/// D = diag(n) on Fourier modes n in [-M, M]; G = sum_k c_k S^k with S the
/// cyclic shift e_n -> e_{n+1}.
ModelInstance build_circle_model(int modes, std::vector<SymbolTerm> symbol,
                                 const BuildOptions& options = {});

/// Qi-Wu-Zhang two-band model on the (2L+1)^2 torus with the dual Dirac
/// operator D+ = (X1 - x0) + i (X2 - y0).
ModelInstance build_qwz_model(int box, double mass, Offset offset = Offset::HalfInteger,
                              const BuildOptions& options = {});

/// Dual Dirac operator of the (2L+1)^2 lattice tensored with an internal
/// space of dimension `internal_dim`. Basis order: H+ block then H- block,
/// each ordered (site, internal).
GradedOperator build_dual_dirac(int box, Offset offset, int internal_dim);

/// Real-space QWZ Hamiltonian on the (2L+1)^2 torus, ordered (site, orbital).
Matrix qwz_hamiltonian(int box, double mass);

/// QWZ Bloch Hamiltonian matching the hopping convention of qwz_hamiltonian.
Eigen::Matrix2cd qwz_bloch(double mass, double kx, double ky);

/// nu copies of the weighted shift e_n -> (n+1) f_{n+1}, n = 0..N-1, from
/// H+ = C^N to H- = C^{N+1}; Index(D+) = -nu. K_rep = h_sign * 1.
ModelInstance build_weighted_shift_dirac(int size, int multiplicity, int h_sign = 1);

/// Writes the manifest and Matrix Market files of a model into `dir`.
std::filesystem::path save_model(const ModelInstance& model, const std::filesystem::path& dir);

/// Loads a manifest (YAML key/value) and its matrices; runs all model
/// validation. Raises FormatError or ValidationError.
ModelInstance load_model(const std::filesystem::path& manifest);

}  // namespace speclocal
