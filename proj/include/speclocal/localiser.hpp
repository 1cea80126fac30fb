#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speclocal/operators.hpp"

namespace speclocal {

enum class Mode { Strict, Permissive };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

struct LocaliserParams {
  double kappa = 0.0;
  double rho = 0.0;
  Mode mode = Mode::Permissive;
};

/// One audited inequality `measured <relation> bound`.
///
/// `holds` is the raw inequality (gap certificates use measured >= bound - 1e-9).
/// `satisfied` applies the mode semantics: in permissive mode a gap
/// certificate is satisfied once the measured gap exceeds zero_tol.
/// `required` certificates abort strict-mode jobs when not satisfied.
struct Certificate {
  std::string name;
  std::string relation;  // ">=", ">", "<=", "<"
  double measured = 0.0;
  double bound = 0.0;
  bool holds = false;
  bool satisfied = false;
  bool required = false;
  std::string note;
};
using GapCertificate = Certificate;

inline constexpr double kGapSlack = 1e-9;

/// kappa D + Gamma H = [[H, kappa D-], [kappa D+, -H]]; H acts on the whole
/// graded space and must commute with the grading.
HermitianOperator build_even_localiser(const Matrix& h, const GradedOperator& d, double kappa);

/// [[kappa D, G], [G*, -kappa D]] on the doubled space.
HermitianOperator build_odd_localiser(const Matrix& g, const HermitianOperator& d, double kappa);

/// Localiser of the model's own (D, K_rep) pair.
HermitianOperator build_localiser(const ModelInstance& model, double kappa);

/// Invertibility of the untruncated localiser under kappa < g^2 / ||[D,H]||
/// with the bound sqrt(g^2 - kappa ||[D,H]||). The measured gap is taken on
/// the localiser compressed to the model's interior indices. Raises
/// HypothesisViolated in strict mode when the hypothesis fails; in
/// permissive mode the certificate is returned unmeasured.
Certificate validate_infinite_regime(const ModelInstance& model, double kappa, Mode mode);

/// The parameter inequalities kappa <= g^3/(12 ||H|| ||[D,H]||) and
/// rho > 2g/kappa (required in strict mode), plus the advisory coupling
/// condition ||H|| < sqrt(g/2 * sqrt(47/48) kappa rho) and endpoint condition
/// max(1, ||H||) < kappa rho. Raises StrictModeViolation in strict mode.
std::vector<Certificate> validate_truncation_params(const ModelInstance& model,
                                                    const LocaliserParams& params);

/// Orthonormal description of Ran P_[-rho,rho](D). When D^2 is diagonal the
/// range is spanned by standard basis vectors and `indices` lists them in
/// increasing order; otherwise `basis` holds eigenvectors of D sorted by
/// eigenvalue (ties by position).
struct SpectralWindow {
  double rho = 0.0;
  std::vector<Index> indices;
  std::vector<Index> complement;
  std::optional<Matrix> basis;
  std::optional<Matrix> complement_basis;
  Index rank = 0;
};

SpectralWindow spectral_window(const HermitianOperator& d, double rho,
                               double eig_sep_tol = kEigSepTol);

/// Compression of an operator acting on `copies` stacked copies of the space
/// of D (1 for even localisers, 2 for odd ones).
Matrix compress_to_window(const Matrix& op, const SpectralWindow& window, int copies);

struct TruncatedLocaliser {
  HermitianOperator matrix;
  Index rank = 0;
  LocaliserParams params;
  SpectralWindow window;
  SpectrumInertia spectrum;
  std::vector<Certificate> certificates;
};

struct TruncateOptions {
  /// Compute the complement-block certificate (always on in strict mode).
  bool complement = false;
};

/// pi_rho L pi_rho^* for L = build_localiser(model, kappa). Attaches the
/// truncated-gap certificate and, when requested, the complement one.
/// Raises ContainmentViolation for rho > containment_radius.
TruncatedLocaliser truncate(const ModelInstance& model, const HermitianOperator& localiser,
                            const LocaliserParams& params, const TruncateOptions& options = {});

/// Complement block pi_rho^c L pi_rho^c* within the box, restricted to the
/// model's interior indices, with its gap certificate against
/// sqrt(47/48) kappa rho. The matrix is empty when the window covers the
/// whole interior.
std::pair<std::optional<HermitianOperator>, Certificate> complement_block(const ModelInstance& model,
                                                            const HermitianOperator& localiser,
                                                            const LocaliserParams& params);

struct PairingOptions {
  bool full_box_certificate = true;
  bool complement_certificate = false;
};

struct PairingResult {
  long value = 0;
  Inertia inertia;
  Index signature = 0;
  long index_correction = 0;  // Index(D+) for even models, 0 for odd
  Index rank = 0;
  double truncated_gap = 0.0;
  std::vector<Certificate> certificates;
};

/// 1/2 Sig(L_rho) + 1/2 Index(D+). Raises IntegerityViolation when the sum
/// is odd and StrictModeViolation when a required certificate fails.
PairingResult pairing_even(const ModelInstance& model, const LocaliserParams& params,
                           const PairingOptions& options = {});

/// 1/2 Sig(L_rho) of the odd localiser.
PairingResult pairing_odd(const ModelInstance& model, const LocaliserParams& params,
                          const PairingOptions& options = {});

/// Dispatches on the model parity.
PairingResult pairing(const ModelInstance& model, const LocaliserParams& params,
                      const PairingOptions& options = {});

}  // namespace speclocal
