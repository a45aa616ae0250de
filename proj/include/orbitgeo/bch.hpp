#pragma once

// Baker-Campbell-Hausdorff series for anti-Hermitian pairs, evaluated in
// Dynkin's commutator form, plus the exponential-splitting defect and the
// scalar-shift identity used for products of e^K and e^D.

#include <cstdint>
#include <numbers>
#include <vector>

#include "orbitgeo/linalg.hpp"

namespace orbitgeo::bch {

/// ||X|| + ||Y|| below this makes the series converge absolutely.
inline constexpr double kConvergenceBound = std::numbers::ln2 / 2.0;
/// ||X|| below this is "sufficiently close to 0".
inline constexpr double kCloseBound = std::numbers::ln2 / 4.0;
/// Highest order with an enumerated Dynkin table.
inline constexpr int kMaxSupportedOrder = 8;

enum class Guard { strict_log2, off };

struct BchConfig {
  int max_order = 8;
  Guard guard = Guard::strict_log2;
};

struct BchTerm {
  int order = 0;
  Matrix value;
};

struct BchResult {
  Matrix value;                 // sum of c_1 .. c_max_order
  double truncation_estimate;   // norm of the last included term
  std::vector<double> term_norms;
};

/// One word of the Dynkin expansion: letters w_1..w_n (bit k set = Y at
/// position k, position 0 outermost) with its rational weight. The term is
/// weight * [w_1, [w_2, ... [w_{n-1}, w_n]]].
struct DynkinWord {
  std::uint32_t letters;
  double weight;
};

/// Nonzero Dynkin words of order n (1 <= n <= kMaxSupportedOrder).
const std::vector<DynkinWord>& dynkin_words(int order);

bool sufficiently_close(const AntiHermitianMatrix& x);

/// c_n(X, Y). Throws capability for n outside [1, kMaxSupportedOrder].
BchTerm bch_term(int order, const AntiHermitianMatrix& x, const AntiHermitianMatrix& y);

/// Partial sum of log(e^X e^Y). With Guard::strict_log2 throws precondition
/// (measured = ||X|| + ||Y||) when the convergence bound is violated.
BchResult bch_log(const AntiHermitianMatrix& x, const AntiHermitianMatrix& y,
                  const BchConfig& cfg = {});

/// e^{S0 + D0} - e^{D0}. The factor multiplying S0 in the exponential
/// splitting is never formed; only the defect is returned.
Matrix exp_splitting_defect(const AntiHermitianMatrix& s0, const DiagonalAH& d0);

/// ||e^K e^D e^{-lambda I} - e^K e^{D - lambda I}|| for purely imaginary
/// lambda = i * lambda_im.
double scalar_shift_identity_check(const AntiHermitianMatrix& k, const DiagonalAH& d, double lambda_im);

}  // namespace orbitgeo::bch
