#include "orbitgeo/unitary_groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "orbitgeo/bch.hpp"

namespace orbitgeo::groups {

std::string_view to_string(UnitaryClass c) {
  switch (c) {
    case UnitaryClass::Uk: return "uk";
    case UnitaryClass::Ud: return "ud";
    case UnitaryClass::Ukd: return "ukd";
    case UnitaryClass::UkPlusD: return "ukplusd";
  }
  return "unknown";
}

UnitaryClass parse_class(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "uk") return UnitaryClass::Uk;
  if (lower == "ud") return UnitaryClass::Ud;
  if (lower == "ukd") return UnitaryClass::Ukd;
  if (lower == "ukplusd" || lower == "uk+d") return UnitaryClass::UkPlusD;
  throw Error(ErrorKind::invalid_input, "unknown unitary class '" + std::string(s) + "'");
}

std::vector<Index> MembershipConfig::resolved_cuts(Index n) const {
  if (!cuts.empty()) return cuts;
  return {resolved_tail_start(n)};
}

namespace {

void require_unitary(const Matrix& u, double tol, const char* what) {
  require_square(u, what);
  if (!all_finite(u)) throw Error(ErrorKind::invalid_input, std::string(what) + ": non-finite entry");
  const double defect = unitarity_defect(u);
  if (defect > tol) throw Error(ErrorKind::structure, std::string(what) + ": matrix is not unitary", defect);
}

double max_tail_drift(const RealVector& drift, Index tail_start) {
  double worst = 0.0;
  for (Index j = tail_start; j < drift.size(); ++j) worst = std::max(worst, std::abs(drift(j)));
  return worst;
}

}  // namespace

UnitaryFactorization factor_kd(const Matrix& u, const MembershipConfig& cfg) {
  require_unitary(u, cfg.unitary_tol, "factor_kd");
  const Index n = u.rows();
  const Index tail = cfg.resolved_tail_start(n);
  RealVector phases(n);
  for (Index j = 0; j < n; ++j) {
    const double mod = std::abs(u(j, j));
    if (mod > kPhaseFloor) {
      phases(j) = std::arg(u(j, j));
    } else if (j < tail) {
      phases(j) = 0.0;
    } else {
      throw Error(ErrorKind::degenerate_factorization,
                  "factor_kd: |u_jj| = " + std::to_string(mod) + " at tail index " + std::to_string(j) +
                      " leaves the phase undefined",
                  mod);
    }
  }
  DiagonalAH d(std::move(phases));
  const Matrix rest = u * d.exp().adjoint();
  AntiHermitianMatrix k = unitary_log(rest, std::max(cfg.unitary_tol, 1e-9));
  const double residual = spectral_norm(exp_ah(k) * d.exp() - u);
  if (!(residual < 1e-7))
    throw Error(ErrorKind::degenerate_factorization, "factor_kd: reconstruction residual too large", residual);
  return {std::move(k), std::move(d)};
}

MembershipVerdict membership(const Matrix& u, UnitaryClass cls, const MembershipConfig& cfg) {
  require_unitary(u, cfg.unitary_tol, "membership");
  const Index n = u.rows();
  const std::vector<Index> cuts = cfg.resolved_cuts(n);
  const Index tail = cfg.resolved_tail_start(n);

  MembershipVerdict v{cls, false, {}};
  v.evidence.diag_modulus_drift = u.diagonal().cwiseAbs().array() - 1.0;

  switch (cls) {
    case UnitaryClass::Uk: {
      v.evidence.tail_profile = tail_norm_profile(u - Matrix::Identity(n, n), cuts);
      v.member = v.evidence.tail_profile.last() < cfg.threshold;
      break;
    }
    case UnitaryClass::Ud: {
      const Matrix off = off_diag_part(u);
      v.evidence.tail_profile = tail_norm_profile(off, cuts);
      v.member = spectral_norm(off) < cfg.threshold;
      break;
    }
    case UnitaryClass::Ukd: {
      v.evidence.tail_profile = tail_norm_profile(off_diag_part(u), cuts);
      v.member = v.evidence.tail_profile.last() < cfg.threshold &&
                 max_tail_drift(v.evidence.diag_modulus_drift, tail) < cfg.drift;
      if (v.member) v.evidence.factor = factor_kd(u, cfg);
      break;
    }
    case UnitaryClass::UkPlusD: {
      // u = e^{K+D} exactly when the off-diagonal part of its principal log
      // is compact; the diagonal part of the log is free.
      const AntiHermitianMatrix l = unitary_log(u, std::max(cfg.unitary_tol, 1e-9));
      v.evidence.tail_profile = tail_norm_profile(off_diag_part(l.matrix()), cuts);
      v.member = v.evidence.tail_profile.last() < cfg.threshold;
      break;
    }
  }
  return v;
}

DiagonalAH reconcile_factorizations(const AntiHermitianMatrix& k1, const DiagonalAH& d1,
                                    const AntiHermitianMatrix& k2, const DiagonalAH& d2) {
  const Index n = k1.dim();
  if (d1.dim() != n || k2.dim() != n || d2.dim() != n)
    throw Error(ErrorKind::dimension, "reconcile_factorizations: dimension mismatch");
  const double mismatch = spectral_norm(exp_ah(k1) * d1.exp() - exp_ah(k2) * d2.exp());
  if (!(mismatch < 1e-8))
    throw Error(ErrorKind::precondition,
                "reconcile_factorizations: the two factorizations represent different unitaries", mismatch);
  return (d2 - d1).wrapped();
}

AntiHermitianMatrix conjugation_transport(const AntiHermitianMatrix& k_prime, const DiagonalAH& d) {
  const Index n = k_prime.dim();
  if (d.dim() != n) throw Error(ErrorKind::dimension, "conjugation_transport: dimension mismatch");
  const double norm = k_prime.norm();
  if (norm >= std::numbers::pi)
    throw Error(ErrorKind::boundary, "conjugation_transport: ||K'|| >= pi is outside the supported regime", norm);
  // (e^{-D} K' e^{D})_ij = e^{-i d_i} K'_ij e^{i d_j}, entrywise.
  Matrix k = k_prime.matrix();
  const RealVector& ph = d.phases();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) k(i, j) *= std::polar(1.0, ph(j) - ph(i));
  return AntiHermitianMatrix::skew_part(k);
}

LocalFactorization local_factor(const Matrix& u, const MembershipConfig& cfg) {
  require_unitary(u, cfg.unitary_tol, "local_factor");
  const Index n = u.rows();
  const double dist = spectral_norm(u - Matrix::Identity(n, n));
  if (!(dist < kLocalRadius))
    throw Error(ErrorKind::out_of_neighborhood,
                "local_factor: ||u - 1|| = " + std::to_string(dist) + " is not below ln(2)/12", dist);
  if (!membership(u, UnitaryClass::Ukd, cfg).member)
    throw Error(ErrorKind::precondition, "local_factor: u fails the U_{k,d} test");

  // Diagonal phases of u are within arcsin(eps0) of 0, so ||e^D - 1|| < 2 eps0.
  RealVector phases(n);
  for (Index j = 0; j < n; ++j) phases(j) = std::arg(u(j, j));
  DiagonalAH d(std::move(phases));
  AntiHermitianMatrix v = unitary_log(u, std::max(cfg.unitary_tol, 1e-9));
  AntiHermitianMatrix k = v - d.as_anti_hermitian();

  const double kn = k.norm();
  const double dn = d.norm();
  if (!(kn < bch::kCloseBound) || !(dn < bch::kCloseBound))
    throw Error(ErrorKind::convergence, "local_factor: factors are not sufficiently close to 0", std::max(kn, dn));
  return {std::move(k), std::move(d), std::move(v)};
}

}  // namespace orbitgeo::groups
