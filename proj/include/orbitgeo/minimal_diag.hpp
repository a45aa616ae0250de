#pragma once

// Quotient norm ||[Z]|| = inf over anti-Hermitian diagonals D of ||Z + D||,
// with a best approximant and a duality certificate, plus an independent
// brute-force oracle for small dimensions.

#include <cstddef>

#include "orbitgeo/linalg.hpp"

namespace orbitgeo::mindiag {

inline constexpr double kDefaultTol = 1e-7;
inline constexpr int kDefaultIterationCap = 10000;

struct QuotientSolution {
  double value = 0.0;         // ||Z + best_diagonal||
  DiagonalAH best_diagonal;
  int iterations = 0;
  double certificate_gap = 0.0;  // value - dual lower bound, >= 0
  double lower_bound = 0.0;
};

struct QuotientOptions {
  double tol = kDefaultTol;
  int iteration_cap = kDefaultIterationCap;
};

/// Minimises d -> ||Z + i diag(d)||. Stops once the certified gap between
/// the returned value and a dual lower bound is at most `tol`.
/// Throws convergence (measured = best value) if the cap is reached first.
QuotientSolution quotient_norm(const AntiHermitianMatrix& z, const QuotientOptions& opts = {});
inline QuotientSolution quotient_norm(const AntiHermitianMatrix& z, double tol) {
  return quotient_norm(z, QuotientOptions{tol, kDefaultIterationCap});
}

/// Dual lower bound tr(H W)/||W||_1 for H = -iZ and any Hermitian W with
/// zero diagonal. Returns 0 when W vanishes.
double dual_lower_bound(const AntiHermitianMatrix& z, const Matrix& w);

/// ||Z|| <= ||[Z]|| + tol.
bool is_minimal(const AntiHermitianMatrix& z, double tol = kDefaultTol);

inline constexpr Index kOracleDimensionCap = 4;

/// Grid search over [-2||Z||, 2||Z||]^n followed by multi-start Nelder-Mead.
/// Shares no code with quotient_norm. Throws capability above `n_cap`.
double oracle_quotient_norm(const AntiHermitianMatrix& z, Index n_cap = kOracleDimensionCap);

}  // namespace orbitgeo::mindiag
