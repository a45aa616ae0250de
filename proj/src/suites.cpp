#include "orbitgeo/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "orbitgeo/bch.hpp"
#include "orbitgeo/geodesics.hpp"
#include "orbitgeo/linalg.hpp"
#include "orbitgeo/matrix_io.hpp"
#include "orbitgeo/minimal_diag.hpp"
#include "orbitgeo/random.hpp"
#include "orbitgeo/unitary_groups.hpp"

namespace orbitgeo::suites {

namespace {

constexpr double kPi = std::numbers::pi;

struct SuiteName {
  Suite suite;
  std::string_view name;
};

constexpr SuiteName kNames[] = {
    {Suite::exp_log, "exp_log"},       {Suite::bch, "bch"},
    {Suite::minlift, "minlift"},       {Suite::groups, "groups"},
    {Suite::geodesics, "geodesics"},   {Suite::props_final, "props_final"},
};

}  // namespace

std::string_view to_string(Suite s) {
  for (const auto& e : kNames)
    if (e.suite == s) return e.name;
  return "unknown";
}

Suite parse_suite(std::string_view s) {
  for (const auto& e : kNames)
    if (e.name == s) return e.suite;
  throw Error(ErrorKind::config, "unknown suite '" + std::string(s) + "'");
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> v = {Suite::exp_log, Suite::bch,       Suite::minlift,
                                       Suite::groups,  Suite::geodesics, Suite::props_final};
  return v;
}

void SuiteConfig::validate() const {
  if (n < 2) throw Error(ErrorKind::config, "suite config: n must be at least 2");
  if (trials < 1) throw Error(ErrorKind::config, "suite config: trials must be at least 1");
  if (only_trial && (*only_trial < 0 || *only_trial >= trials))
    throw Error(ErrorKind::config, "suite config: replay trial index out of range");
  for (const auto& [k, v] : tolerances)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::config, "suite config: tolerance '" + k + "' must be positive");
}

bool SuiteReport::all_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.pass(); });
}

namespace {

struct Check {
  std::string name;
  double tolerance;
  double residual;
  std::string error;
  bool pass;
};

// Everything one trial produces. Instances are kept as matrix JSON so that a
// failing trial can be inspected without re-running it.
class Trial {
 public:
  Trial(const SuiteConfig& cfg, int index)
      : cfg_(cfg), index_(index),
        seed_(rnd::derive_seed(cfg.seed, static_cast<std::uint64_t>(cfg.suite) + 1, static_cast<std::uint64_t>(index))),
        rng_(seed_) {}

  rnd::Rng& rng() { return rng_; }
  Index n() const { return cfg_.n; }
  std::uint64_t seed() const { return seed_; }

  void keep(const std::string& name, const Matrix& a) { instance_.emplace_back(name, a); }

  // Records residual < tolerance. A thrown library error is a failure.
  void check(const std::string& name, double tolerance, const std::function<double()>& measure) {
    const auto it = cfg_.tolerances.find(name);
    if (it != cfg_.tolerances.end()) tolerance = it->second;
    Check c{name, tolerance, 0.0, {}, false};
    try {
      c.residual = measure();
      if (!std::isfinite(c.residual)) {
        c.error = "non-finite residual";
      } else {
        c.pass = c.residual < tolerance;
      }
    } catch (const Error& e) {
      c.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
    }
    checks_.push_back(std::move(c));
  }

  std::string instance_json() const {
    std::string out = "{";
    for (std::size_t k = 0; k < instance_.size(); ++k) {
      if (k) out += ", ";
      out += fmt::format("\"{}\": {}", instance_[k].first, io::matrix_to_json(instance_[k].second));
    }
    return out + "}";
  }

  std::vector<Check>& checks() { return checks_; }

 private:
  const SuiteConfig& cfg_;
  int index_;
  std::uint64_t seed_;
  rnd::Rng rng_;
  std::vector<std::pair<std::string, Matrix>> instance_;
  std::vector<Check> checks_;
};

double boolean_residual(bool ok) { return ok ? 0.0 : 1.0; }

Matrix taylor_exp(const Matrix& x, int terms) {
  const Index n = x.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k < terms; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

double wrapped_distance(const RealVector& a, const RealVector& b) {
  double worst = 0.0;
  for (Index j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(wrap_phase(a(j) - b(j))));
  return worst;
}

// ---------------------------------------------------------------------------

void run_exp_log(Trial& t) {
  const Index n = t.n();
  const AntiHermitianMatrix x = rnd::anti_hermitian(t.rng(), n, t.rng().uniform(0.1, kPi - 0.1));
  t.keep("X", x.matrix());
  const Matrix u = exp_ah(x);

  t.check("log_exp_roundtrip", 1e-8, [&] { return spectral_norm(unitary_log(u).matrix() - x.matrix()); });
  t.check("exp_unitarity", 1e-10, [&] { return unitarity_defect(u); });
  t.check("log_norm_bound", 1e-12, [&] { return std::max(0.0, unitary_log(u).norm() - kPi); });
  t.check("taylor_agreement", 1e-9, [&] {
    const AntiHermitianMatrix y = x * (1.0 / std::max(1.0, x.norm()));
    return spectral_norm(exp_ah(y) - taylor_exp(y.matrix(), 30));
  });
  t.check("norm_homogeneity", 1e-12, [&] {
    const Complex c(t.rng().uniform(-3.0, 3.0), t.rng().uniform(-3.0, 3.0));
    const double lhs = spectral_norm(c * x.matrix());
    return std::abs(lhs - std::abs(c) * x.norm()) / std::max(lhs, 1e-300);
  });
  t.check("scalar_shift_identity", 1e-10, [&] {
    const DiagonalAH d = rnd::diagonal_ah(t.rng(), n, kPi);
    return bch::scalar_shift_identity_check(x, d, t.rng().uniform(-kPi, kPi));
  });
}

void run_bch(Trial& t) {
  const Index n = t.n();
  const double total = t.rng().uniform(0.02, 0.34);
  const double split = t.rng().uniform(0.2, 0.8);
  const AntiHermitianMatrix x = rnd::anti_hermitian(t.rng(), n, split * total);
  const AntiHermitianMatrix y = rnd::anti_hermitian(t.rng(), n, (1.0 - split) * total);
  t.keep("X", x.matrix());
  t.keep("Y", y.matrix());
  const Matrix oracle = unitary_log(exp_ah(x) * exp_ah(y)).matrix();

  std::vector<double> errors;
  for (int order = 1; order <= bch::kMaxSupportedOrder; ++order)
    errors.push_back(spectral_norm(bch::bch_log(x, y, {order, bch::Guard::strict_log2}).value - oracle));

  t.check("bch_vs_log", 1e-5, [&] { return errors.back(); });
  // Non-increasing from order 2 on, up to a rounding floor.
  t.check("bch_error_monotone", 1e-13, [&] {
    double worst = 0.0;
    for (std::size_t k = 2; k < errors.size(); ++k) worst = std::max(worst, errors[k] - errors[k - 1]);
    return worst;
  });
  t.check("bch_trace_free_higher", 1e-13, [&] {
    double worst = 0.0;
    for (int order = 2; order <= bch::kMaxSupportedOrder; ++order)
      worst = std::max(worst, std::abs(bch::bch_term(order, x, y).value.trace()));
    return worst;
  });
  t.check("diag_commutator_with_diagonal", 1e-15, [&] {
    const DiagonalAH d = rnd::diagonal_ah(t.rng(), n, 1.0);
    return diag_part(commutator(d.matrix(), x.matrix())).cwiseAbs().maxCoeff();
  });
  t.check("guard_enforced", 0.5, [&] {
    const AntiHermitianMatrix big = x * (0.3 / x.norm());
    try {
      bch::bch_log(big, big);
    } catch (const Error& e) {
      return boolean_residual(e.kind() == ErrorKind::precondition && e.measured() &&
                              std::abs(*e.measured() - 0.6) < 1e-12);
    }
    return 1.0;
  });
  t.check("splitting_defect_bound", 1e-12, [&] {
    const DiagonalAH d = rnd::diagonal_ah(t.rng(), n, kPi);
    return std::max(0.0, spectral_norm(bch::exp_splitting_defect(x, d)) - x.norm());
  });
  t.check("splitting_defect_tail", 1e-12, [&] {
    const Index r = std::max<Index>(1, n / 2);
    const AntiHermitianMatrix s = rnd::block_supported(t.rng(), n, r, 1.0);
    const DiagonalAH d = rnd::diagonal_ah(t.rng(), n, kPi);
    const Index cut = r;
    if (cut >= n) return 0.0;
    return tail_norm_profile(bch::exp_splitting_defect(s, d), std::span<const Index>(&cut, 1)).last();
  });
}

void run_minlift(Trial& t) {
  const Index n = t.n();
  const AntiHermitianMatrix z = rnd::anti_hermitian(t.rng(), n, t.rng().uniform(0.5, 2.0));
  t.keep("Z", z.matrix());
  const mindiag::QuotientSolution q = mindiag::quotient_norm(z);

  t.check("certificate_gap", mindiag::kDefaultTol * (1.0 + 1e-12), [&] { return q.certificate_gap; });
  t.check("value_consistency", 1e-9,
          [&] { return std::abs(q.value - spectral_norm(z.matrix() + q.best_diagonal.matrix())); });
  t.check("value_bounds", 1e-12, [&] { return std::max(0.0, q.value - z.norm()) + std::max(0.0, -q.value); });
  t.check("probe_optimality", 1e-9, [&] {
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double s = k < 5 ? 1e-3 : z.norm();
      const DiagonalAH probe = q.best_diagonal + rnd::diagonal_ah(t.rng(), n, s);
      worst = std::max(worst, q.value - spectral_norm(z.matrix() + probe.matrix()));
    }
    return worst;
  });
  if (n <= mindiag::kOracleDimensionCap)
    t.check("oracle_gap", 1e-5, [&] { return std::abs(q.value - mindiag::oracle_quotient_norm(z)); });

  const mindiag::QuotientSolution fine = mindiag::quotient_norm(z, 1e-10);
  t.check("conjugation_invariance", 1e-8, [&] {
    const Matrix w = rnd::diagonal_ah(t.rng(), n, kPi).exp();
    const AntiHermitianMatrix zw = AntiHermitianMatrix::skew_part(w * z.matrix() * w.adjoint());
    return std::abs(mindiag::quotient_norm(zw, 1e-10).value - fine.value);
  });
  t.check("translation_invariance", 1e-8, [&] {
    const DiagonalAH d = rnd::diagonal_ah(t.rng(), n, 2.0);
    return std::abs(mindiag::quotient_norm(z + d.as_anti_hermitian(), 1e-10).value - fine.value);
  });
}

void run_groups(Trial& t) {
  const Index n = t.n();
  const Index r = std::max<Index>(1, n / 2);
  auto& rng = t.rng();
  const AntiHermitianMatrix k1 = rnd::block_supported(rng, n, r, rng.uniform(0.1, 3.0));
  const AntiHermitianMatrix k2 = rnd::block_supported(rng, n, r, rng.uniform(0.1, 3.0));
  const DiagonalAH d1 = rnd::diagonal_ah(rng, n, kPi);
  const DiagonalAH d2 = rnd::diagonal_ah(rng, n, kPi);
  t.keep("K1", k1.matrix());
  t.keep("K2", k2.matrix());
  t.keep("D1", d1.matrix());
  t.keep("D2", d2.matrix());
  const Matrix u1 = exp_ah(k1) * d1.exp();
  const Matrix u2 = d2.exp() * exp_ah(k2);
  const groups::MembershipConfig mc;

  auto member = [&](const Matrix& u) {
    return boolean_residual(groups::membership(u, groups::UnitaryClass::Ukd, mc).member);
  };
  t.check("ukd_contains_kd", 0.5, [&] { return member(u1); });
  t.check("ukd_contains_dk", 0.5, [&] { return member(u2); });
  t.check("ukd_product_closure", 0.5, [&] { return member(u1 * u2); });
  t.check("ukd_inverse_closure", 0.5, [&] { return member(u1.adjoint()); });
  t.check("ukplusd_inside_ukd", 0.5, [&] { return member(exp_ah(k1 + d1.as_anti_hermitian())); });
  t.check("uk_member", 0.5, [&] {
    return boolean_residual(groups::membership(exp_ah(k1), groups::UnitaryClass::Uk, mc).member);
  });
  t.check("closedness_surrogate", 0.5, [&] {
    // Members converging to u1 and the limit itself all pass.
    bool ok = true;
    for (int m = 1; m <= 4; ++m) {
      const DiagonalAH dm = d1 + DiagonalAH(RealVector::Constant(n, std::pow(10.0, -m)));
      ok = ok && groups::membership(exp_ah(k1) * dm.exp(), groups::UnitaryClass::Ukd, mc).member;
    }
    return boolean_residual(ok && groups::membership(u1, groups::UnitaryClass::Ukd, mc).member);
  });
  t.check("swap_not_ukd", 0.5, [&] {
    Matrix s = Matrix::Identity(n, n);
    for (Index j = 0; j + 1 < n; j += 2) {
      s(j, j) = s(j + 1, j + 1) = 0.0;
      s(j, j + 1) = s(j + 1, j) = 1.0;
    }
    return boolean_residual(!groups::membership(s, groups::UnitaryClass::Ukd, mc).member);
  });
  t.check("factor_roundtrip", 1e-7, [&] {
    const groups::UnitaryFactorization f = groups::factor_kd(u1 * u2, mc);
    return spectral_norm(exp_ah(f.k) * f.d.exp() - u1 * u2);
  });
  t.check("reconcile_planted", 1e-7, [&] {
    RealVector planted = RealVector::Zero(n);
    for (Index j = 0; j < r; ++j) planted(j) = rng.uniform(-1.0, 1.0);
    const DiagonalAH d0(planted);
    const AntiHermitianMatrix k2p = unitary_log(exp_ah(k1) * d0.exp().adjoint(), 1e-9);
    const DiagonalAH d2p = d1 + d0;
    const DiagonalAH d = groups::reconcile_factorizations(k1, d1, k2p, d2p);
    const double id1 = spectral_norm(exp_ah(k2p) - exp_ah(k1) * d.exp().adjoint());
    const double id2 = spectral_norm(d2p.exp() - d.exp() * d1.exp());
    return std::max({wrapped_distance(d.phases(), planted), id1, id2});
  });
  t.check("transport_intertwining", 1e-9, [&] {
    const AntiHermitianMatrix kp = rnd::anti_hermitian(rng, n, rng.uniform(0.1, 3.0));
    const DiagonalAH d = rnd::diagonal_ah(rng, n, kPi);
    const AntiHermitianMatrix k = groups::conjugation_transport(kp, d);
    return spectral_norm(d.exp() * exp_ah(k) - exp_ah(kp) * d.exp());
  });
  t.check("transport_norm", 1e-10, [&] {
    const AntiHermitianMatrix kp = rnd::anti_hermitian(rng, n, rng.uniform(0.1, 3.0));
    const DiagonalAH d = rnd::diagonal_ah(rng, n, kPi);
    return std::abs(groups::conjugation_transport(kp, d).norm() - kp.norm());
  });
  t.check("local_factor_roundtrip", 1e-7, [&] {
    const AntiHermitianMatrix k0 = rnd::block_supported(rng, n, r, rng.uniform(0.001, 0.02));
    const DiagonalAH d0 = rnd::diagonal_ah(rng, n, 0.02);
    const AntiHermitianMatrix v0 = k0 + d0.as_anti_hermitian();
    const groups::LocalFactorization lf = groups::local_factor(exp_ah(v0), mc);
    return spectral_norm((lf.k + lf.d.as_anti_hermitian()).matrix() - v0.matrix());
  });
  t.check("product_log_tail", 1e-10, [&] {
    // Sufficiently close factors: log(e^{K1+D1} e^{K2+D2}) - (D1 + D2) has a
    // vanishing tail when K1, K2 are supported on the head block.
    const AntiHermitianMatrix a1 = rnd::block_supported(rng, n, r, rng.uniform(0.01, 0.17));
    const AntiHermitianMatrix a2 = rnd::block_supported(rng, n, r, rng.uniform(0.01, 0.17));
    const DiagonalAH e1 = rnd::diagonal_ah(rng, n, 0.17);
    const DiagonalAH e2 = rnd::diagonal_ah(rng, n, 0.17);
    const Matrix prod = exp_ah(a1 + e1.as_anti_hermitian()) * exp_ah(a2 + e2.as_anti_hermitian());
    const Matrix kt = unitary_log(prod).matrix() - (e1 + e2).matrix();
    if (r >= n) return 0.0;
    const Index cut = r;
    return tail_norm_profile(kt, std::span<const Index>(&cut, 1)).last();
  });
}

void run_geodesics(Trial& t) {
  const Index n = t.n();
  auto& rng = t.rng();
  const geo::DiagonalObservable b = rnd::distinct_diag_b(n, 1.0);
  const AntiHermitianMatrix z = rnd::off_diagonal(rng, n, rng.uniform(0.5, 1.5));
  const AntiHermitianMatrix k0 = rnd::compact_role(rng, n, 0.5);
  t.keep("Z", z.matrix());
  t.keep("K0", k0.matrix());

  const Matrix x = geo::tangent_of(z, b);
  t.check("lift_roundtrip", 1e-9, [&] { return spectral_norm(geo::lift_tangent(x, b).matrix() - z.matrix()) / z.norm(); });

  const geo::MinimalLifting ml = geo::minimal_lifting(x, b, 1e-10);
  const AntiHermitianMatrix& z0 = ml.z0;
  const double z0n = z0.norm();
  const auto [lo, hi] = geo::geodesic_interval(z0);
  geo::GeodesicSpec spec{b, z0, std::nullopt, 0.0, hi};

  t.check("minimal_lifting_norm", 1e-9, [&] { return std::abs(z0n - ml.norm); });
  t.check("isospectral", 1e-9, [&] {
    double worst = 0.0;
    RealVector sorted = b.lambdas();
    std::sort(sorted.begin(), sorted.end());
    for (double s : {lo, 0.3 * hi, hi, 5.0}) {
      const HermEig e = herm_eig(geo::geodesic_eval(spec, s));
      worst = std::max(worst, (e.values - sorted).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  t.check("constant_speed", 1e-6, [&] {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double s = lo + (hi - lo) * k / 19.0;
      worst = std::max(worst, std::abs(geo::finsler_speed(spec, s, 1e-9) - z0n));
    }
    return worst;
  });
  const geo::LengthReport lr = geo::curve_length(spec);
  t.check("length_formula", 1e-6, [&] { return std::max(0.0, std::abs(lr.length - z0n * hi) - lr.est_error); });
  t.check("competitors_not_shorter", 1e-6, [&] {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t_end = rng.uniform(0.3, 1.0) * hi;
      const AntiHermitianMatrix w = rnd::off_diagonal(rng, n, rng.uniform(0.05, 1.0));
      const geo::LengthReport c = geo::curve_length(geo::competitor_curve(b, z0, w, t_end));
      worst = std::max(worst, z0n * t_end - c.length);
    }
    return worst;
  });

  const AntiHermitianMatrix zc = geo::transport_minimal(k0, z0);
  t.check("transport_norm", 1e-10, [&] { return std::abs(zc.norm() - z0n); });
  t.check("transport_curve", 1e-9, [&] {
    const Matrix ek = exp_ah(k0);
    const Matrix c = ek * b.matrix() * ek.adjoint();
    double worst = 0.0;
    for (double s : {0.0, 0.1, 0.5}) {
      const Matrix e = exp_ah(zc * s);
      const Matrix beta = e * c * e.adjoint();
      const Matrix gamma = geo::geodesic_eval(spec, s);
      worst = std::max(worst, spectral_norm(beta - ek * gamma * ek.adjoint()));
    }
    return worst;
  });
  t.check("transported_speed", 1e-6, [&] {
    geo::GeodesicSpec moved{b, z0, k0, 0.0, hi};
    return std::abs(geo::finsler_speed(moved, 0.4 * hi, 1e-9) - z0n);
  });
  t.check("orbit_equality", 1e-12, [&] {
    return geo::orbit_equality_residual(k0, rnd::diagonal_ah(rng, n, kPi), b);
  });
}

void run_props_final(Trial& t) {
  const Index n = t.n();
  auto& rng = t.rng();

  // e^{tK1}e^{D1} = e^{tK2}e^{D2} for all t forces K1 = K2 and e^{D1} = e^{D2};
  // the constructed pairs realise this through block-constant phases
  // commuting with a block-diagonal K1 and 2*pi shifts of D1.
  const Index r = std::max<Index>(1, n / 2);
  Matrix blocks = Matrix::Zero(n, n);
  blocks.topLeftCorner(r, r) = rnd::anti_hermitian(rng, r, rng.uniform(0.2, 1.5)).matrix();
  if (n > r) blocks.bottomRightCorner(n - r, n - r) = rnd::anti_hermitian(rng, n - r, rng.uniform(0.2, 1.5)).matrix();
  const AntiHermitianMatrix k1 = AntiHermitianMatrix::skew_part(blocks);
  RealVector phase(n);
  const double pa = rng.uniform(-kPi, kPi);
  const double pb = rng.uniform(-kPi, kPi);
  for (Index j = 0; j < n; ++j) phase(j) = j < r ? pa : pb;
  const Matrix w = DiagonalAH(phase).exp();
  const AntiHermitianMatrix k2 = AntiHermitianMatrix::skew_part(w * k1.matrix() * w.adjoint());
  const DiagonalAH d1 = rnd::diagonal_ah(rng, n, kPi);
  RealVector shift(n);
  for (Index j = 0; j < n; ++j) shift(j) = 2.0 * kPi * static_cast<double>(static_cast<int>(rng.uniform(0.0, 3.0)) - 1);
  const DiagonalAH d2 = d1 + DiagonalAH(shift);
  t.keep("K1", k1.matrix());
  t.keep("D1", d1.matrix());

  t.check("equal_quotient", 0.5, [&] {
    return boolean_residual(geo::verify_equal_quotient(k1, d1, k2, d2, {0.0, 0.25, 0.5, 0.75, 1.0}));
  });

  // Minimal K + D: a minimal lifting rescaled below pi/2, split into its
  // diagonal (perturbed) and the rest.
  const AntiHermitianMatrix z = rnd::off_diagonal(rng, n, 1.0);
  const mindiag::QuotientSolution q = mindiag::quotient_norm(z, 1e-10);
  const AntiHermitianMatrix m0 = z + q.best_diagonal.as_anti_hermitian();
  const AntiHermitianMatrix m = m0 * (rng.uniform(0.3, kPi / 2.0 - 0.05) / m0.norm());
  const DiagonalAH d = DiagonalAH::from_diagonal_of(m.matrix()) + rnd::diagonal_ah(rng, n, 0.1);
  const AntiHermitianMatrix k = m - d.as_anti_hermitian();
  t.keep("K", k.matrix());
  t.keep("D", d.matrix());
  t.check("minimal_inequality", 1e-6, [&] {
    const geo::MinimalInequality mi = geo::verify_minimal_inequality(k, d);
    return mi.lhs - mi.rhs;
  });
  t.check("minimal_inequality_gate", 0.5, [&] {
    try {
      geo::verify_minimal_inequality(m * (2.0 / m.norm()) - d.as_anti_hermitian(), d);
    } catch (const Error& e) {
      return boolean_residual(e.kind() == ErrorKind::precondition);
    }
    return 1.0;
  });
}

void run_trial(Trial& t, Suite s) {
  switch (s) {
    case Suite::exp_log: return run_exp_log(t);
    case Suite::bch: return run_bch(t);
    case Suite::minlift: return run_minlift(t);
    case Suite::groups: return run_groups(t);
    case Suite::geodesics: return run_geodesics(t);
    case Suite::props_final: return run_props_final(t);
  }
}

struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  std::string instance;
};

int worker_count(const SuiteConfig& cfg, int jobs) {
  int w = cfg.workers;
  if (w <= 0) {
    w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("ORBITGEO_WORKERS")) {
      const int cap = std::atoi(env);
      if (cap > 0) w = std::min(w, cap);
    }
  }
  return std::clamp(w, 1, std::max(1, jobs));
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string json_number(double x) { return std::isfinite(x) ? io::format_double(x) : "null"; }

}  // namespace

SuiteReport run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<int> indices;
  if (cfg.only_trial) {
    indices.push_back(*cfg.only_trial);
  } else {
    for (int i = 0; i < cfg.trials; ++i) indices.push_back(i);
  }
  std::vector<TrialResult> results(indices.size());

  auto work = [&](std::size_t slot) {
    Trial t(cfg, indices[slot]);
    try {
      run_trial(t, cfg.suite);
    } catch (const Error& e) {
      // Instance construction itself failed; report it as its own property.
      t.check("trial_setup", 0.5, [&]() -> double { throw e; });
    }
    results[slot] = {t.seed(), std::move(t.checks()), t.instance_json()};
  };

  const int workers = worker_count(cfg, static_cast<int>(indices.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < indices.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < indices.size(); k = next++) work(k);
      });
    for (auto& th : pool) th.join();
  }

  // Assembly in trial order, independent of scheduling.
  SuiteReport report;
  report.config = cfg;
  std::map<std::string, std::size_t> slot_of;
  for (std::size_t k = 0; k < results.size(); ++k) {
    for (const Check& c : results[k].checks) {
      auto [it, fresh] = slot_of.emplace(c.name, report.properties.size());
      if (fresh) report.properties.push_back({c.name, c.tolerance, 0, 0, 0.0, {}});
      PropertyResult& p = report.properties[it->second];
      ++p.checked;
      if (c.error.empty()) p.worst = std::max(p.worst, c.residual);
      if (!c.pass) {
        ++p.failed;
        p.failures.push_back({indices[k], results[k].seed, c.residual, c.error, results[k].instance,
                              fnv1a(results[k].instance)});
      }
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string report_jsonl(const SuiteReport& report) {
  const SuiteConfig& c = report.config;
  std::string out;
  for (const PropertyResult& p : report.properties) {
    out += fmt::format(
        "{{\"suite\": \"{}\", \"n\": {}, \"trials\": {}, \"seed\": {}, \"property\": \"{}\", \"pass\": {}, "
        "\"checked\": {}, \"failed\": {}, \"worst\": {}, \"tolerance\": {}, \"failures\": [",
        to_string(c.suite), c.n, c.trials, c.seed, p.name, p.pass() ? "true" : "false", p.checked, p.failed,
        json_number(p.worst), json_number(p.tolerance));
    for (std::size_t k = 0; k < p.failures.size(); ++k) {
      const Failure& f = p.failures[k];
      if (k) out += ", ";
      out += fmt::format("{{\"trial\": {}, \"trial_seed\": {}, \"residual\": {}, \"error\": {}, \"digest\": \"{}\", "
                         "\"instance\": {}}}",
                         f.trial, f.trial_seed, f.error.empty() ? json_number(f.residual) : "null",
                         nlohmann::json(f.error).dump(), f.digest, f.instance_json);
    }
    out += "]}\n";
  }
  return out;
}

std::string report_summary(const SuiteReport& report) {
  const SuiteConfig& c = report.config;
  std::string out = fmt::format("suite {} n={} trials={} seed={}: {} ({:.3f} s)\n", to_string(c.suite), c.n, c.trials,
                                c.seed, report.all_pass() ? "PASS" : "FAIL", report.wall_seconds);
  for (const PropertyResult& p : report.properties)
    out += fmt::format("  {:<32} {:>4}/{:<4} worst {:.3e} (tol {:.1e}){}\n", p.name, p.checked - p.failed, p.checked,
                       p.worst, p.tolerance, p.pass() ? "" : "  FAIL");
  return out;
}

std::vector<ReplayOutcome> replay_report(std::string_view jsonl) {
  std::vector<ReplayOutcome> out;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::format, std::string("replay: malformed report line: ") + e.what());
    }
    if (doc.value("failures", nlohmann::json::array()).empty()) continue;
    SuiteConfig cfg;
    try {
      cfg.suite = parse_suite(doc.at("suite").get<std::string>());
      cfg.n = doc.at("n").get<int>();
      cfg.trials = doc.at("trials").get<int>();
      cfg.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::format, std::string("replay: report line lacks its config: ") + e.what());
    }
    const std::string property = doc.at("property").get<std::string>();
    cfg.tolerances[property] = doc.at("tolerance").get<double>();
    for (const auto& f : doc.at("failures")) {
      cfg.only_trial = f.at("trial").get<int>();
      const SuiteReport rerun = run_suite(cfg);
      ReplayOutcome o{property, *cfg.only_trial, f.at("residual").is_number() ? f.at("residual").get<double>() : NAN,
                      NAN, false};
      for (const PropertyResult& p : rerun.properties) {
        if (p.name != property || p.failures.empty()) continue;
        const Failure& g = p.failures.front();
        o.replayed = g.error.empty() ? g.residual : NAN;
        const bool same_error = !g.error.empty() && f.at("error").get<std::string>() == g.error;
        o.reproduced = same_error || (g.error.empty() && g.residual == o.recorded);
      }
      out.push_back(o);
    }
  }
  return out;
}

}  // namespace orbitgeo::suites
