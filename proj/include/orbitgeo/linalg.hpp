#pragma once

// Dense complex matrix algebra used throughout the toolkit: structure-tagged
// carriers, Hermitian eigendecomposition, exponential and logarithm on the
// unitary group, the operator norm, and the tail-decay compactness proxy.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orbitgeo/error.hpp"

namespace orbitgeo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultStructureTol = 1e-10;

/// Largest singular value. Throws invalid_input on non-finite entries and
/// dimension on non-square input.
double spectral_norm(const Matrix& a);

/// Operator norm of a Hermitian matrix via its eigenvalues (max |lambda|).
/// The caller guarantees the structure; no check is made.
double hermitian_norm(const Matrix& h);

bool all_finite(const Matrix& a);
void require_square(const Matrix& a, const char* what);

Matrix commutator(const Matrix& a, const Matrix& b);

/// Diag(A): same diagonal as A, zero elsewhere.
Matrix diag_part(const Matrix& a);
/// A - Diag(A).
Matrix off_diag_part(const Matrix& a);

/// ||u* u - I|| in operator norm.
double unitarity_defect(const Matrix& u);

/// Anti-Hermitian carrier. Construction validates ||A + A*|| <= tol * ||A||.
class AntiHermitianMatrix {
 public:
  explicit AntiHermitianMatrix(Matrix a, double structure_tol = kDefaultStructureTol);

  /// (A - A*)/2, exactly skew by construction.
  static AntiHermitianMatrix skew_part(const Matrix& a);
  static AntiHermitianMatrix zero(Index n);

  const Matrix& matrix() const noexcept { return a_; }
  Index dim() const noexcept { return a_.rows(); }
  double structure_tol() const noexcept { return tol_; }
  double norm() const { return spectral_norm(a_); }

  AntiHermitianMatrix operator+(const AntiHermitianMatrix& o) const;
  AntiHermitianMatrix operator-(const AntiHermitianMatrix& o) const;
  AntiHermitianMatrix operator*(double s) const;
  AntiHermitianMatrix operator-() const;

 private:
  struct Trusted {};
  AntiHermitianMatrix(Matrix a, double tol, Trusted) : a_(std::move(a)), tol_(tol) {}

  Matrix a_;
  double tol_;
};

/// Anti-Hermitian diagonal i*diag(phases).
class DiagonalAH {
 public:
  DiagonalAH() = default;
  explicit DiagonalAH(RealVector phases);

  static DiagonalAH zero(Index n) { return DiagonalAH(RealVector::Zero(n)); }
  /// Imaginary parts of the diagonal of `a`; the real parts are discarded.
  static DiagonalAH from_diagonal_of(const Matrix& a);

  const RealVector& phases() const noexcept { return phases_; }
  Index dim() const noexcept { return phases_.size(); }

  Matrix matrix() const;
  AntiHermitianMatrix as_anti_hermitian() const;
  /// e^D = diag(exp(i d_j)), computed entrywise.
  Matrix exp() const;
  double norm() const;

  /// Phases reduced to (-pi, pi].
  DiagonalAH wrapped() const;

  DiagonalAH operator+(const DiagonalAH& o) const;
  DiagonalAH operator-(const DiagonalAH& o) const;
  DiagonalAH operator-() const;
  DiagonalAH operator*(double s) const;

 private:
  RealVector phases_;
};

/// Reduce a phase to (-pi, pi].
double wrap_phase(double theta);

struct HermEig {
  RealVector values;  // ascending
  Matrix vectors;     // unitary, columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws structure when
/// ||H - H*|| exceeds tol * max(1, ||H||).
HermEig herm_eig(const Matrix& h, double structure_tol = kDefaultStructureTol);

/// e^X for anti-Hermitian X via the eigendecomposition of -iX.
Matrix exp_ah(const AntiHermitianMatrix& x);

/// Principal logarithm on the unitary group: eigenphases in (-pi, pi], with
/// eigenvalue -1 mapped to +i*pi. Result satisfies ||K|| <= pi.
/// Throws structure when ||u*u - I|| > unitary_tol.
AntiHermitianMatrix unitary_log(const Matrix& u, double unitary_tol = kDefaultStructureTol);

struct TailProfile {
  std::vector<Index> cut_indices;
  std::vector<double> tail_norms;

  double last() const { return tail_norms.empty() ? 0.0 : tail_norms.back(); }
};

/// tail_norms[j] = ||A - P_m A P_m|| with m = cuts[j], P_m the projection on
/// the first m basis vectors. Cuts must be strictly increasing and < n.
TailProfile tail_norm_profile(const Matrix& a, std::span<const Index> cuts);

}  // namespace orbitgeo
