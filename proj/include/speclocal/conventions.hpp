#pragma once

#include <filesystem>
#include <string>

#include "speclocal/kernels.hpp"
#include "speclocal/operators.hpp"

namespace speclocal {

/// Signs relating half-signature pairings to raw oracle outputs:
/// pairing = even_sign * oracle (even models), odd_sign * oracle (odd models).
struct Conventions {
  int even_sign = 0;
  int odd_sign = 0;
  std::string notes;
};

/// $SPECLOCAL_CONVENTIONS if set, otherwise conventions.txt at the source root.
std::filesystem::path default_conventions_path();

/// Parses `key = value` lines; '#' starts a comment. ConfigError when a sign
/// is missing or not +1/-1.
Conventions load_conventions(const std::filesystem::path& path);
void save_conventions(const std::filesystem::path& path, const Conventions& conventions);

struct ConventionDerivation {
  Conventions conventions;
  long circle_pairing = 0;  // 1/2 Sig for the circle model with winding 1
  long circle_oracle = 0;
  long qwz_pairing = 0;     // 1/2 Sig + 1/2 Index for QWZ with m = 1
  long qwz_oracle = 0;
};

/// Runs the circle model (M = 60, symbol e^{i theta}, kappa = 0.05,
/// rho = 30.5) and the QWZ model (L = 12, m = 1, kappa = 0.5, rho = 8.5) and
/// reads off the two signs.
ConventionDerivation derive_conventions();

/// Convention-adjusted oracle value for a model.
long expected_pairing(const ModelInstance& model, long raw_oracle, const Conventions& conventions);

}  // namespace speclocal
