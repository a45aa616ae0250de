#pragma once

// Reproducible random instances. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; uniforms and normals are derived here
// rather than through <random> distributions, which are implementation
// defined.

#include <cstdint>
#include <random>
#include <string_view>

#include "orbitgeo/geodesics.hpp"
#include "orbitgeo/linalg.hpp"

namespace orbitgeo::rnd {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box-Muller (one value per call).
  double normal();
  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser over (seed, stream, index): per-trial seeds that do
/// not depend on execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

enum class RandomKind { anti_hermitian, diagonal_ah, compact_role, distinct_diag_b };
RandomKind parse_kind(std::string_view s);

/// (G - G*)/2 from complex Gaussian G, rescaled to ||A|| = scale.
AntiHermitianMatrix anti_hermitian(Rng& rng, Index n, double scale);
/// Phases uniform on [-scale, scale].
DiagonalAH diagonal_ah(Rng& rng, Index n, double scale);
/// Like anti_hermitian but with entry (i, j) damped by 1/(i + j) (1-based)
/// before rescaling, so tails decay.
AntiHermitianMatrix compact_role(Rng& rng, Index n, double scale);
/// Anti-Hermitian, supported on the leading r x r block, ||K|| = scale.
AntiHermitianMatrix block_supported(Rng& rng, Index n, Index r, double scale);
/// Off-diagonal anti-Hermitian with ||W|| = scale.
AntiHermitianMatrix off_diagonal(Rng& rng, Index n, double scale);
/// b = diag(scale * 2^{-i}), i = 1..n.
geo::DiagonalObservable distinct_diag_b(Index n, double scale);

/// Untyped entry point used by the CLI. Throws invalid_input unless scale > 0.
Matrix gen_random(RandomKind kind, Index n, double scale, std::uint64_t seed);

}  // namespace orbitgeo::rnd
