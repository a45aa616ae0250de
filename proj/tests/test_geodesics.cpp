#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "orbitgeo/geodesics.hpp"
#include "orbitgeo/random.hpp"
#include "test_util.hpp"

using namespace orbitgeo;
using namespace orbitgeo::geo;
using testutil::thrown_kind;

namespace {

constexpr double kPi = std::numbers::pi;

RealVector vec(std::initializer_list<double> v) {
  RealVector r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

GeodesicSpec spec_for(const DiagonalObservable& b, const AntiHermitianMatrix& z0) {
  const auto [lo, hi] = geodesic_interval(z0);
  return GeodesicSpec{b, z0, std::nullopt, lo, hi};
}

}  // namespace

TEST(Observable, SeparationAndGenerator) {
  EXPECT_EQ(thrown_kind([] { DiagonalObservable(vec({1.0, 1.0 + 1e-12})); }), ErrorKind::conditioning);
  const DiagonalObservable b = rnd::distinct_diag_b(3, 1.0);
  EXPECT_EQ(b.lambdas(), vec({0.5, 0.25, 0.125}));
}

TEST(Lift, RoundTripAndTangency) {
  rnd::Rng rng(51);
  const DiagonalObservable b = rnd::distinct_diag_b(5, 1.0);
  const AntiHermitianMatrix z = rnd::off_diagonal(rng, 5, 1.0);
  const Matrix x = tangent_of(z, b);
  EXPECT_LT(spectral_norm(lift_tangent(x, b).matrix() - z.matrix()), 1e-12);
  EXPECT_LT(spectral_norm(lift_tangent(TangentVector{b.matrix(), x}, b).matrix() - z.matrix()), 1e-12);

  Matrix bad = x;
  bad(1, 1) = 0.1;
  EXPECT_EQ(thrown_kind([&] { lift_tangent(bad, b); }), ErrorKind::not_tangent);
  EXPECT_EQ(thrown_kind([&] { lift_tangent(TangentVector{Matrix::Identity(5, 5), x}, b); }), ErrorKind::not_tangent);
}

TEST(MinimalLifting, NormIsQuotientNorm) {
  rnd::Rng rng(52);
  const DiagonalObservable b = rnd::distinct_diag_b(4, 1.0);
  const AntiHermitianMatrix z = rnd::anti_hermitian(rng, 4, 1.0);
  const MinimalLifting ml = minimal_lifting(tangent_of(z, b), b, 1e-10);
  EXPECT_NEAR(ml.z0.norm(), ml.norm, 1e-12);
  EXPECT_NEAR(ml.norm, mindiag::quotient_norm(z, 1e-10).value, 1e-9);
  EXPECT_LT(spectral_norm(tangent_of(ml.z0, b) - tangent_of(z, b)), 1e-12);
}

TEST(Interval, Values) {
  const AntiHermitianMatrix z(testutil::mat2(0.0, 2.0, -2.0, 0.0));
  const auto [lo, hi] = geodesic_interval(z);
  EXPECT_DOUBLE_EQ(hi, kPi / 4.0);
  EXPECT_DOUBLE_EQ(lo, -kPi / 4.0);
  EXPECT_EQ(thrown_kind([] { geodesic_interval(AntiHermitianMatrix::zero(3)); }), ErrorKind::undefined_interval);
}

TEST(Geodesic, FullSwapAtEndOfInterval) {
  // e^{tZ} with Z = [[0,1],[-1,0]] is a rotation; at t = pi/2 it exchanges the eigenvalues.
  const DiagonalObservable b(vec({1.0, -1.0}));
  const AntiHermitianMatrix z(testutil::mat2(0.0, 1.0, -1.0, 0.0));
  const GeodesicSpec spec = spec_for(b, z);
  EXPECT_DOUBLE_EQ(spec.t_hi, kPi / 2.0);
  const Matrix end = geodesic_eval(spec, spec.t_hi);
  EXPECT_LT(spectral_norm(end - DiagonalObservable(vec({-1.0, 1.0})).matrix()), 1e-14);
  const LengthReport lr = curve_length(GeodesicSpec{b, z, std::nullopt, 0.0, kPi / 2.0});
  EXPECT_NEAR(lr.length, kPi / 2.0, 1e-9);
  EXPECT_EQ(lr.quadrature_nodes, 16 * 5);
}

TEST(Geodesic, ConstantSpeedAndLength) {
  rnd::Rng rng(53);
  for (Index n : {2, 3, 5}) {
    const DiagonalObservable b = rnd::distinct_diag_b(n, 1.0);
    const MinimalLifting ml = minimal_lifting(tangent_of(rnd::off_diagonal(rng, n, 1.0), b), b, 1e-10);
    const GeodesicSpec spec = spec_for(b, ml.z0);
    for (int j = 0; j <= 10; ++j) {
      const double t = spec.t_lo + (spec.t_hi - spec.t_lo) * j / 10.0;
      EXPECT_NEAR(finsler_speed(spec, t, 1e-10), ml.norm, 1e-6);
    }
    const LengthReport lr = curve_length(spec);
    EXPECT_NEAR(lr.length, ml.norm * (spec.t_hi - spec.t_lo), lr.est_error + 1e-6);
    EXPECT_EQ(lr.node_times.size(), lr.per_node_speeds.size());
  }
}

TEST(Geodesic, CompetitorsNotShorter) {
  rnd::Rng rng(54);
  const DiagonalObservable b = rnd::distinct_diag_b(3, 1.0);
  const MinimalLifting ml = minimal_lifting(tangent_of(rnd::off_diagonal(rng, 3, 1.0), b), b, 1e-10);
  const double t_end = 0.8 * geodesic_interval(ml.z0).second;
  for (int c = 0; c < 5; ++c) {
    const GeneratorCurve g = competitor_curve(b, ml.z0, rnd::off_diagonal(rng, 3, rng.uniform(0.1, 1.0)), t_end);
    EXPECT_GE(curve_length(g).length, ml.norm * t_end - 1e-6);
    // Same endpoints as the geodesic.
    const GeodesicSpec spec{b, ml.z0, std::nullopt, 0.0, t_end};
    const Matrix ue = exp_ah(AntiHermitianMatrix::skew_part(g.g(t_end)));
    EXPECT_LT(spectral_norm(ue * b.matrix() * ue.adjoint() - geodesic_eval(spec, t_end)), 1e-12);
  }
}

TEST(Geodesic, ExpDerivativeMatchesFiniteDifference) {
  rnd::Rng rng(55);
  const Matrix g = rnd::anti_hermitian(rng, 4, 1.5).matrix();
  const Matrix gd = rnd::anti_hermitian(rng, 4, 1.0).matrix();
  const double h = 1e-5;
  const Matrix u = testutil::taylor_exp(g);
  const Matrix du = (testutil::taylor_exp(g + h * gd) - testutil::taylor_exp(g - h * gd)) / (2.0 * h);
  EXPECT_LT(spectral_norm(exp_derivative_pullback(g, gd) - u.adjoint() * du), 1e-8);
}

TEST(Geodesic, SampledCurveSpeed) {
  rnd::Rng rng(56);
  const DiagonalObservable b = rnd::distinct_diag_b(3, 1.0);
  const MinimalLifting ml = minimal_lifting(tangent_of(rnd::off_diagonal(rng, 3, 1.0), b), b, 1e-10);
  const GeodesicSpec spec = spec_for(b, ml.z0);
  const SampledCurve sc{b, [spec](double t) { return geodesic_eval(spec, t); }, 0.0, 0.5 * spec.t_hi};
  EXPECT_NEAR(finsler_speed(sc, 0.25 * spec.t_hi), ml.norm, 1e-5);
}

TEST(Transport, BasePointChange) {
  rnd::Rng rng(57);
  const DiagonalObservable b = rnd::distinct_diag_b(4, 1.0);
  const MinimalLifting ml = minimal_lifting(tangent_of(rnd::off_diagonal(rng, 4, 1.0), b), b, 1e-10);
  const AntiHermitianMatrix k0 = rnd::compact_role(rng, 4, 0.7);
  const AntiHermitianMatrix zc = transport_minimal(k0, ml.z0);
  EXPECT_NEAR(zc.norm(), ml.z0.norm(), 1e-12);
  GeodesicSpec moved = spec_for(b, ml.z0);
  moved.k0 = k0;
  const Matrix ek = exp_ah(k0);
  const Matrix c = ek * b.matrix() * ek.adjoint();
  for (double t : {0.0, 0.3, moved.t_hi}) {
    const Matrix e = exp_ah(zc * t);
    EXPECT_LT(spectral_norm(e * c * e.adjoint() - geodesic_eval(moved, t)), 1e-12);
    EXPECT_NEAR(finsler_speed(moved, t, 1e-10), ml.norm, 1e-8);
  }
}

TEST(OrbitEquality, DiagonalFactorFixesObservable) {
  rnd::Rng rng(58);
  const DiagonalObservable b = rnd::distinct_diag_b(5, 1.0);
  EXPECT_LT(orbit_equality_residual(rnd::anti_hermitian(rng, 5, 2.0), rnd::diagonal_ah(rng, 5, kPi), b), 1e-12);
}

TEST(EqualQuotient, BlockConstruction) {
  rnd::Rng rng(59);
  Matrix blocks = Matrix::Zero(4, 4);
  blocks.topLeftCorner(2, 2) = rnd::anti_hermitian(rng, 2, 1.0).matrix();
  blocks.bottomRightCorner(2, 2) = rnd::anti_hermitian(rng, 2, 0.7).matrix();
  const AntiHermitianMatrix k1 = AntiHermitianMatrix::skew_part(blocks);
  const Matrix w = DiagonalAH(vec({0.4, 0.4, -2.0, -2.0})).exp();
  const AntiHermitianMatrix k2 = AntiHermitianMatrix::skew_part(w * k1.matrix() * w.adjoint());
  const DiagonalAH d1 = rnd::diagonal_ah(rng, 4, 1.0);
  const DiagonalAH d2 = d1 + DiagonalAH(vec({2.0 * kPi, 0.0, -2.0 * kPi, 0.0}));
  EXPECT_TRUE(verify_equal_quotient(k1, d1, k2, d2, {0.0, 0.5, 1.0}));
  EXPECT_EQ(thrown_kind([&] { verify_equal_quotient(k1, d1, k1 * 0.5, d1, {1.0}); }), ErrorKind::precondition);
}

TEST(MinimalInequality, HoldsAndGates) {
  rnd::Rng rng(60);
  for (int k = 0; k < 5; ++k) {
    const AntiHermitianMatrix z = rnd::off_diagonal(rng, 4, 1.0);
    const mindiag::QuotientSolution q = mindiag::quotient_norm(z, 1e-10);
    const AntiHermitianMatrix m0 = z + q.best_diagonal.as_anti_hermitian();
    const AntiHermitianMatrix m = m0 * (1.2 / m0.norm());
    const DiagonalAH d = DiagonalAH::from_diagonal_of(m.matrix()) + rnd::diagonal_ah(rng, 4, 0.1);
    const MinimalInequality mi = verify_minimal_inequality(m - d.as_anti_hermitian(), d);
    EXPECT_TRUE(mi.holds);
    EXPECT_LE(mi.lhs, mi.rhs + 1e-6);
  }
  // ||K + D|| = 2 lies outside the admissible ball.
  const AntiHermitianMatrix big(testutil::mat2(0.0, 2.0, -2.0, 0.0));
  EXPECT_EQ(thrown_kind([&] { verify_minimal_inequality(big, DiagonalAH::zero(2)); }), ErrorKind::precondition);
}
