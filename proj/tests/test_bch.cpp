#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "orbitgeo/bch.hpp"
#include "orbitgeo/random.hpp"
#include "test_util.hpp"

using namespace orbitgeo;
using testutil::thrown_kind;

namespace {

Matrix br(const Matrix& a, const Matrix& b) { return a * b - b * a; }

struct Pair {
  AntiHermitianMatrix x, y;
};

Pair small_pair(rnd::Rng& rng, Index n, double total) {
  return {rnd::anti_hermitian(rng, n, 0.5 * total), rnd::anti_hermitian(rng, n, 0.5 * total)};
}

}  // namespace

TEST(Bch, LowOrderTermsMatchClosedForms) {
  rnd::Rng rng(21);
  for (int k = 0; k < 10; ++k) {
    const Pair p = small_pair(rng, 2 + k % 5, 0.3);
    const Matrix& x = p.x.matrix();
    const Matrix& y = p.y.matrix();
    const Matrix c1 = x + y;
    const Matrix c2 = 0.5 * br(x, y);
    const Matrix c3 = (br(x, br(x, y)) + br(y, br(y, x))) / 12.0;
    const Matrix c4 = -br(y, br(x, br(x, y))) / 24.0;
    EXPECT_LT(spectral_norm(bch::bch_term(1, p.x, p.y).value - c1), 1e-15);
    EXPECT_LT(spectral_norm(bch::bch_term(2, p.x, p.y).value - c2), 1e-15);
    EXPECT_LT(spectral_norm(bch::bch_term(3, p.x, p.y).value - c3), 1e-15);
    EXPECT_LT(spectral_norm(bch::bch_term(4, p.x, p.y).value - c4), 1e-15);
  }
}

TEST(Bch, DynkinTablesCoverSupportedOrders) {
  for (int n = 1; n <= bch::kMaxSupportedOrder; ++n) EXPECT_FALSE(bch::dynkin_words(n).empty()) << n;
  rnd::Rng rng(22);
  const Pair p = small_pair(rng, 3, 0.1);
  EXPECT_EQ(thrown_kind([&] { bch::bch_term(9, p.x, p.y); }), ErrorKind::capability);
  EXPECT_EQ(thrown_kind([&] { bch::bch_term(0, p.x, p.y); }), ErrorKind::capability);
}

TEST(Bch, AgreesWithLogarithmOfProduct) {
  rnd::Rng rng(23);
  for (int k = 0; k < 30; ++k) {
    const Pair p = small_pair(rng, 2 + k % 7, rng.uniform(0.05, bch::kConvergenceBound - 1e-3));
    const Matrix oracle = unitary_log(exp_ah(p.x) * exp_ah(p.y)).matrix();
    EXPECT_LT(spectral_norm(bch::bch_log(p.x, p.y).value - oracle), 1e-5);
  }
}

TEST(Bch, ErrorDecreasesWithOrder) {
  rnd::Rng rng(24);
  const Pair p = small_pair(rng, 4, 0.3);
  const Matrix oracle = unitary_log(exp_ah(p.x) * exp_ah(p.y)).matrix();
  double prev = INFINITY;
  for (int order = 1; order <= 8; ++order) {
    const double e = spectral_norm(bch::bch_log(p.x, p.y, {order, bch::Guard::strict_log2}).value - oracle);
    EXPECT_LE(e, prev + 1e-15) << order;
    prev = e;
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(Bch, CommutingPairIsExactSum) {
  rnd::Rng rng(25);
  const AntiHermitianMatrix x = rnd::diagonal_ah(rng, 4, 2.0).as_anti_hermitian();
  const AntiHermitianMatrix y = rnd::diagonal_ah(rng, 4, 2.0).as_anti_hermitian();
  const bch::BchResult r = bch::bch_log(x, y, {8, bch::Guard::off});
  EXPECT_LT(spectral_norm(r.value - (x + y).matrix()), 1e-15);
}

TEST(Bch, GuardRejectsLargePairs) {
  rnd::Rng rng(26);
  const AntiHermitianMatrix x = rnd::anti_hermitian(rng, 3, 0.2);
  const AntiHermitianMatrix y = rnd::anti_hermitian(rng, 3, 0.2);
  try {
    bch::bch_log(x, y);
    FAIL() << "guard did not fire";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
    ASSERT_TRUE(e.measured());
    EXPECT_NEAR(*e.measured(), 0.4, 1e-12);
  }
  EXPECT_FALSE(thrown_kind([&] { bch::bch_log(x, y, {8, bch::Guard::off}); }));
}

TEST(Bch, HigherTermsAreTraceFree) {
  rnd::Rng rng(27);
  const Pair p = small_pair(rng, 5, 0.3);
  for (int order = 2; order <= 8; ++order)
    EXPECT_LT(std::abs(bch::bch_term(order, p.x, p.y).value.trace()), 1e-15) << order;
}

TEST(Bch, CloseBound) {
  rnd::Rng rng(28);
  EXPECT_TRUE(bch::sufficiently_close(rnd::anti_hermitian(rng, 3, 0.1)));
  EXPECT_FALSE(bch::sufficiently_close(rnd::anti_hermitian(rng, 3, 0.2)));
}

TEST(Splitting, DefectMatchesDefinitionAndIsBounded) {
  rnd::Rng rng(29);
  for (int k = 0; k < 10; ++k) {
    const AntiHermitianMatrix s = rnd::anti_hermitian(rng, 4, rng.uniform(1e-4, 0.5));
    const DiagonalAH d = rnd::diagonal_ah(rng, 4, 3.0);
    const Matrix defect = bch::exp_splitting_defect(s, d);
    EXPECT_LT(spectral_norm(defect - (exp_ah(s + d.as_anti_hermitian()) - d.exp())), 1e-13);
    // ||e^A - e^B|| <= ||A - B|| on anti-Hermitian matrices.
    EXPECT_LE(spectral_norm(defect), s.norm() + 1e-14);
  }
}

TEST(ScalarShift, IdentityHolds) {
  rnd::Rng rng(30);
  for (int k = 0; k < 10; ++k) {
    const AntiHermitianMatrix kk = rnd::anti_hermitian(rng, 3, 1.0);
    const DiagonalAH d = rnd::diagonal_ah(rng, 3, 3.0);
    EXPECT_LT(bch::scalar_shift_identity_check(kk, d, rng.uniform(-5.0, 5.0)), 1e-13);
  }
}
