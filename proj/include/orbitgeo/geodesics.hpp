#pragma once

// Unitary orbit of a diagonal observable b with simple spectrum: tangent
// liftings, minimal liftings, the curves e^{tZ} b e^{-tZ}, Finsler speed
// and length by Gauss-Legendre quadrature, and base-point transport.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "orbitgeo/linalg.hpp"
#include "orbitgeo/minimal_diag.hpp"

namespace orbitgeo::geo {

inline constexpr double kSeparationFloor = 1e-8;

/// b = diag(lambdas), pairwise distinct. Throws conditioning when two
/// eigenvalues are closer than the floor.
class DiagonalObservable {
 public:
  explicit DiagonalObservable(RealVector lambdas, double separation_floor = kSeparationFloor);

  const RealVector& lambdas() const noexcept { return lambdas_; }
  Index dim() const noexcept { return lambdas_.size(); }
  double separation_floor() const noexcept { return floor_; }
  Matrix matrix() const;

 private:
  RealVector lambdas_;
  double floor_;
};

/// Hermitian x tangent to the orbit at the point `at`.
struct TangentVector {
  Matrix at;
  Matrix value;
};

/// [Z, b] = Zb - bZ.
Matrix tangent_of(const AntiHermitianMatrix& z, const DiagonalObservable& b);

/// Z with Z_ij = x_ij / (lambda_j - lambda_i) off the diagonal and Diag(Z) = 0.
/// Throws not_tangent when Diag(x) != 0 within 1e-10 * max(1, ||x||).
AntiHermitianMatrix lift_tangent(const Matrix& x, const DiagonalObservable& b);
/// Same, after checking that x is based at b itself.
AntiHermitianMatrix lift_tangent(const TangentVector& x, const DiagonalObservable& b);

struct MinimalLifting {
  AntiHermitianMatrix z0;
  double norm;  // ||x||_b
};

MinimalLifting minimal_lifting(const Matrix& x, const DiagonalObservable& b, double tol = mindiag::kDefaultTol);

struct GeodesicSpec {
  DiagonalObservable b;
  AntiHermitianMatrix z0;
  std::optional<AntiHermitianMatrix> k0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// e^{K0} e^{tZ0} b e^{-tZ0} e^{-K0}.
Matrix geodesic_eval(const GeodesicSpec& spec, double t);

/// Quotient norm of the velocity pulled back to b.
double finsler_speed(const GeodesicSpec& spec, double t, double tol = mindiag::kDefaultTol);

/// beta(t) = e^{G(t)} b e^{-G(t)} for a smooth anti-Hermitian generator G.
struct GeneratorCurve {
  DiagonalObservable b;
  std::function<Matrix(double)> g;
  std::function<Matrix(double)> g_dot;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// U*U' for U = e^{G(t)}, exact through the eigendecomposition of G(t).
Matrix exp_derivative_pullback(const Matrix& g, const Matrix& g_dot);

double finsler_speed(const GeneratorCurve& curve, double t, double tol = mindiag::kDefaultTol);

/// G(t) = t Z0 + (t/T)(1 - t/T) W on [0, T]: same endpoints as the geodesic.
GeneratorCurve competitor_curve(const DiagonalObservable& b, const AntiHermitianMatrix& z0,
                                const AntiHermitianMatrix& w, double t_end);

/// A curve on the orbit given only by its values; velocity by central
/// differences with step (t_hi - t_lo)/1024.
struct SampledCurve {
  DiagonalObservable b;
  std::function<Matrix(double)> beta;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

double finsler_speed(const SampledCurve& curve, double t, double tol = mindiag::kDefaultTol);

struct QuadratureConfig {
  int panels = 16;
  double tol = 1e-9;  // quotient-norm tolerance at each node
};

struct LengthReport {
  double length = 0.0;
  int quadrature_nodes = 0;
  std::vector<double> node_times;
  std::vector<double> per_node_speeds;
  double est_error = 0.0;  // |L(panels) - L(2 panels)|
};

/// Composite 5-point Gauss-Legendre of the Finsler speed.
LengthReport curve_length(const GeodesicSpec& spec, const QuadratureConfig& cfg = {});
LengthReport curve_length(const GeneratorCurve& curve, const QuadratureConfig& cfg = {});
LengthReport curve_length(const SampledCurve& curve, const QuadratureConfig& cfg = {});

/// z_c = e^{K0} Z0 e^{-K0}.
AntiHermitianMatrix transport_minimal(const AntiHermitianMatrix& k0, const AntiHermitianMatrix& z0);

/// [-pi/(2||Z0||), pi/(2||Z0||)]. Throws undefined_interval for Z0 = 0.
std::pair<double, double> geodesic_interval(const AntiHermitianMatrix& z0);

/// ||e^K e^D b e^{-D} e^{-K} - e^K b e^{-K}||.
double orbit_equality_residual(const AntiHermitianMatrix& k, const DiagonalAH& d, const DiagonalObservable& b);

/// Checks e^{tK1}e^{D1} = e^{tK2}e^{D2} at every sample (within 1e-8, else
/// precondition with the worst residual), then compares the quotient norms.
bool verify_equal_quotient(const AntiHermitianMatrix& k1, const DiagonalAH& d1, const AntiHermitianMatrix& k2,
                           const DiagonalAH& d2, const std::vector<double>& t_samples);

struct MinimalInequality {
  double lhs;  // ||[K]||
  double rhs;  // ||[K']||, K' = log(e^{K+D} e^{-D})
  bool holds;
};

/// Requires K + D minimal within 1e-6 and ||K + D|| < pi/2 - 1e-6.
MinimalInequality verify_minimal_inequality(const AntiHermitianMatrix& k, const DiagonalAH& d);

}  // namespace orbitgeo::geo
