#include "orbitgeo/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace orbitgeo::rnd {

double Rng::normal() {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Matrix gaussian(Rng& rng, Index n) {
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  return g;
}

AntiHermitianMatrix rescaled(const Matrix& a, double scale) {
  AntiHermitianMatrix s = AntiHermitianMatrix::skew_part(a);
  const double norm = s.norm();
  if (norm == 0.0) return s;
  return s * (scale / norm);
}

void require_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::invalid_input, "random generation: scale must be positive");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
}

RandomKind parse_kind(std::string_view s) {
  if (s == "anti_hermitian") return RandomKind::anti_hermitian;
  if (s == "diagonal_ah") return RandomKind::diagonal_ah;
  if (s == "compact_role") return RandomKind::compact_role;
  if (s == "distinct_diag_b") return RandomKind::distinct_diag_b;
  throw Error(ErrorKind::invalid_input, "unknown random kind '" + std::string(s) + "'");
}

AntiHermitianMatrix anti_hermitian(Rng& rng, Index n, double scale) {
  require_scale(scale);
  return rescaled(gaussian(rng, n), scale);
}

DiagonalAH diagonal_ah(Rng& rng, Index n, double scale) {
  require_scale(scale);
  RealVector d(n);
  for (Index j = 0; j < n; ++j) d(j) = rng.uniform(-scale, scale);
  return DiagonalAH(std::move(d));
}

AntiHermitianMatrix compact_role(Rng& rng, Index n, double scale) {
  require_scale(scale);
  Matrix g = gaussian(rng, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) /= static_cast<double>(i + j + 2);
  return rescaled(g, scale);
}

AntiHermitianMatrix block_supported(Rng& rng, Index n, Index r, double scale) {
  require_scale(scale);
  if (r < 1 || r > n) throw Error(ErrorKind::invalid_input, "block_supported: block size out of range");
  Matrix g = Matrix::Zero(n, n);
  g.topLeftCorner(r, r) = gaussian(rng, r);
  return rescaled(g, scale);
}

AntiHermitianMatrix off_diagonal(Rng& rng, Index n, double scale) {
  require_scale(scale);
  Matrix g = gaussian(rng, n);
  g.diagonal().setZero();
  return rescaled(g, scale);
}

geo::DiagonalObservable distinct_diag_b(Index n, double scale) {
  require_scale(scale);
  RealVector l(n);
  for (Index i = 0; i < n; ++i) l(i) = std::ldexp(scale, -static_cast<int>(i + 1));
  return geo::DiagonalObservable(std::move(l));
}

Matrix gen_random(RandomKind kind, Index n, double scale, std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case RandomKind::anti_hermitian: return anti_hermitian(rng, n, scale).matrix();
    case RandomKind::diagonal_ah: return diagonal_ah(rng, n, scale).matrix();
    case RandomKind::compact_role: return compact_role(rng, n, scale).matrix();
    case RandomKind::distinct_diag_b: return distinct_diag_b(n, scale).matrix();
  }
  throw Error(ErrorKind::invalid_input, "gen_random: unknown kind");
}

}  // namespace orbitgeo::rnd
