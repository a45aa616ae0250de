#pragma once

// Membership tests and factorizations for the unitary groups U_k (u - 1
// compact), U_d (diagonal), U_{k,d} = U_k U_d and U_{k+d} = exp(K + D) on
// truncated operators. "Compact" is read through the tail-norm proxy.

#include <numbers>
#include <optional>
#include <vector>

#include "orbitgeo/linalg.hpp"

namespace orbitgeo::groups {

enum class UnitaryClass { Uk, Ud, Ukd, UkPlusD };

std::string_view to_string(UnitaryClass c);
/// Accepts "uk", "ud", "ukd", "ukplusd" (case-insensitive). Throws invalid_input.
UnitaryClass parse_class(std::string_view s);

/// Radius of the neighbourhood of 1 where local_factor applies.
inline constexpr double kLocalRadius = std::numbers::ln2 / 12.0;
/// Diagonal entries of modulus at most this have no usable phase.
inline constexpr double kPhaseFloor = 0.5;

struct MembershipConfig {
  std::vector<Index> cuts;     // empty: a single cut at tail_start
  double threshold = 1e-6;     // tail norm at the final cut
  double drift = 1e-6;         // max ||u_jj| - 1| over the tail window
  Index tail_start = -1;       // negative: floor(n/2), i.e. last ceil(n/2) indices
  double unitary_tol = kDefaultStructureTol;

  Index resolved_tail_start(Index n) const { return tail_start < 0 ? n / 2 : tail_start; }
  std::vector<Index> resolved_cuts(Index n) const;
};

struct UnitaryFactorization {
  AntiHermitianMatrix k;
  DiagonalAH d;
};

struct MembershipEvidence {
  TailProfile tail_profile;
  RealVector diag_modulus_drift;  // |u_jj| - 1
  std::optional<UnitaryFactorization> factor;
};

struct MembershipVerdict {
  UnitaryClass cls;
  bool member = false;
  MembershipEvidence evidence;
};

/// Throws structure if u is not unitary within cfg.unitary_tol.
MembershipVerdict membership(const Matrix& u, UnitaryClass cls, const MembershipConfig& cfg = {});

/// u = e^K e^D with D from the diagonal phases of u and K = log(u e^{-D}).
/// Throws degenerate_factorization when a tail diagonal entry has modulus
/// <= kPhaseFloor.
UnitaryFactorization factor_kd(const Matrix& u, const MembershipConfig& cfg = {});

/// d with e^{K2} = e^{K1} e^{-d} and e^{D2} = e^d e^{D1}, phases in (-pi, pi].
/// Throws precondition unless ||e^{K1}e^{D1} - e^{K2}e^{D2}|| < 1e-8.
DiagonalAH reconcile_factorizations(const AntiHermitianMatrix& k1, const DiagonalAH& d1,
                                    const AntiHermitianMatrix& k2, const DiagonalAH& d2);

/// e^{-D} K' e^{D}. Throws boundary when ||K'|| >= pi.
AntiHermitianMatrix conjugation_transport(const AntiHermitianMatrix& k_prime, const DiagonalAH& d);

struct LocalFactorization {
  AntiHermitianMatrix k;
  DiagonalAH d;
  AntiHermitianMatrix v;  // k + d = log(u)
};

/// u = e^{K+D} for u near 1. Throws out_of_neighborhood when
/// ||u - 1|| >= kLocalRadius and precondition when u fails the U_{k,d} test.
LocalFactorization local_factor(const Matrix& u, const MembershipConfig& cfg = {});

}  // namespace orbitgeo::groups
