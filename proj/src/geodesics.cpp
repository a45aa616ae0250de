#include "orbitgeo/geodesics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace orbitgeo::geo {

DiagonalObservable::DiagonalObservable(RealVector lambdas, double separation_floor)
    : lambdas_(std::move(lambdas)), floor_(separation_floor) {
  const Index n = lambdas_.size();
  if (!lambdas_.allFinite()) throw Error(ErrorKind::invalid_input, "DiagonalObservable: non-finite eigenvalue");
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) gap = std::min(gap, std::abs(lambdas_(i) - lambdas_(j)));
  if (gap <= floor_)
    throw Error(ErrorKind::conditioning,
                "DiagonalObservable: eigenvalue separation " + std::to_string(gap) + " is below the floor", gap);
}

Matrix DiagonalObservable::matrix() const { return lambdas_.cast<Complex>().asDiagonal(); }

Matrix tangent_of(const AntiHermitianMatrix& z, const DiagonalObservable& b) {
  if (z.dim() != b.dim()) throw Error(ErrorKind::dimension, "tangent_of: dimension mismatch");
  const RealVector& l = b.lambdas();
  Matrix x = z.matrix();
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) x(i, j) *= (l(j) - l(i));
  return x;
}

AntiHermitianMatrix lift_tangent(const Matrix& x, const DiagonalObservable& b) {
  require_square(x, "lift_tangent");
  if (x.rows() != b.dim()) throw Error(ErrorKind::dimension, "lift_tangent: dimension mismatch");
  if (!all_finite(x)) throw Error(ErrorKind::invalid_input, "lift_tangent: non-finite entry");
  const Index n = x.rows();
  const double scale = std::max(1.0, n == 0 ? 0.0 : spectral_norm(x));
  const double diag = n == 0 ? 0.0 : x.diagonal().cwiseAbs().maxCoeff();
  if (diag > 1e-10 * scale)
    throw Error(ErrorKind::not_tangent, "lift_tangent: Diag(x) is not zero", diag);
  const RealVector& l = b.lambdas();
  Matrix z = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j) z(i, j) = x(i, j) / (l(j) - l(i));
  // x Hermitian makes z anti-Hermitian; the projection removes rounding.
  const Matrix herm_defect = x - x.adjoint();
  if (n > 0 && spectral_norm(herm_defect) > 1e-10 * scale)
    throw Error(ErrorKind::not_tangent, "lift_tangent: x is not Hermitian", spectral_norm(herm_defect));
  return AntiHermitianMatrix::skew_part(z);
}

AntiHermitianMatrix lift_tangent(const TangentVector& x, const DiagonalObservable& b) {
  if (x.at.rows() != b.dim() || x.at.cols() != b.dim())
    throw Error(ErrorKind::dimension, "lift_tangent: base point dimension mismatch");
  const double off_base = spectral_norm(x.at - b.matrix());
  if (off_base > 1e-10 * std::max(1.0, b.lambdas().cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::not_tangent, "lift_tangent: tangent vector is not based at b", off_base);
  return lift_tangent(x.value, b);
}

MinimalLifting minimal_lifting(const Matrix& x, const DiagonalObservable& b, double tol) {
  const AntiHermitianMatrix z = lift_tangent(x, b);
  const mindiag::QuotientSolution q = mindiag::quotient_norm(z, tol);
  return {z + q.best_diagonal.as_anti_hermitian(), q.value};
}

namespace {

void check_spec(const GeodesicSpec& spec) {
  const Index n = spec.b.dim();
  if (spec.z0.dim() != n || (spec.k0 && spec.k0->dim() != n))
    throw Error(ErrorKind::dimension, "geodesic spec: dimension mismatch");
}

Matrix spec_unitary(const GeodesicSpec& spec, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::invalid_input, "geodesic: t must be finite");
  Matrix u = exp_ah(spec.z0 * t);
  if (spec.k0) u = exp_ah(*spec.k0) * u;
  return u;
}

double speed_from_pullback(const Matrix& x, const DiagonalObservable& b, double tol) {
  return mindiag::quotient_norm(lift_tangent(x, b), tol).value;
}

}  // namespace

Matrix geodesic_eval(const GeodesicSpec& spec, double t) {
  check_spec(spec);
  const Matrix u = spec_unitary(spec, t);
  const Matrix c = u * spec.b.matrix() * u.adjoint();
  return 0.5 * (c + c.adjoint());
}

double finsler_speed(const GeodesicSpec& spec, double t, double tol) {
  check_spec(spec);
  const Matrix u = spec_unitary(spec, t);
  // gamma'(t) = U [Z0, b] U*; pull back to b by U* . U.
  const Matrix velocity = u * tangent_of(spec.z0, spec.b) * u.adjoint();
  const Matrix x = u.adjoint() * velocity * u;
  return speed_from_pullback(0.5 * (x + x.adjoint()), spec.b, tol);
}

Matrix exp_derivative_pullback(const Matrix& g, const Matrix& g_dot) {
  require_square(g, "exp_derivative_pullback");
  const Index n = g.rows();
  // G = V diag(i theta) V*; U*U' = V (M o E) V*, M = V* G' V,
  // E_kl = (e^{i(theta_l - theta_k)} - 1) / (i(theta_l - theta_k)).
  const HermEig eig = herm_eig(Complex(0.0, -1.0) * g, 1e-9);
  const Matrix& v = eig.vectors;
  Matrix m = v.adjoint() * g_dot * v;
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k < n; ++k) {
      const double delta = eig.values(l) - eig.values(k);
      Complex e;
      if (std::abs(delta) < 1e-6) {
        e = Complex(1.0, delta / 2.0) - delta * delta / 6.0;
      } else {
        e = (std::polar(1.0, delta) - 1.0) / Complex(0.0, delta);
      }
      m(k, l) *= e;
    }
  }
  return v * m * v.adjoint();
}

double finsler_speed(const GeneratorCurve& curve, double t, double tol) {
  if (!std::isfinite(t)) throw Error(ErrorKind::invalid_input, "finsler_speed: t must be finite");
  const Matrix omega = exp_derivative_pullback(curve.g(t), curve.g_dot(t));
  // beta' = U [Omega, b] U*, which pulls back to [Omega, b].
  const Matrix b = curve.b.matrix();
  const Matrix x = omega * b - b * omega;
  return speed_from_pullback(0.5 * (x + x.adjoint()), curve.b, tol);
}

GeneratorCurve competitor_curve(const DiagonalObservable& b, const AntiHermitianMatrix& z0,
                                const AntiHermitianMatrix& w, double t_end) {
  if (z0.dim() != b.dim() || w.dim() != b.dim()) throw Error(ErrorKind::dimension, "competitor_curve: dimension mismatch");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw Error(ErrorKind::invalid_input, "competitor_curve: end time must be positive");
  const Matrix z = z0.matrix();
  const Matrix bump = w.matrix();
  auto g = [z, bump, t_end](double t) {
    const double s = t / t_end;
    return Matrix(t * z + s * (1.0 - s) * bump);
  };
  auto g_dot = [z, bump, t_end](double t) {
    const double s = t / t_end;
    return Matrix(z + (1.0 - 2.0 * s) / t_end * bump);
  };
  return {b, g, g_dot, 0.0, t_end};
}

double finsler_speed(const SampledCurve& curve, double t, double tol) {
  if (!std::isfinite(t)) throw Error(ErrorKind::invalid_input, "finsler_speed: t must be finite");
  const Index n = curve.b.dim();
  const double h = (curve.t_hi - curve.t_lo) / 1024.0;
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_input, "finsler_speed: sampled curve needs a nonempty interval");
  const Matrix c = curve.beta(t);
  const Matrix velocity = (curve.beta(t + h) - curve.beta(t - h)) / (2.0 * h);

  // c = W b W*, with the eigenvalues of c matched to b's ordering. The
  // eigenvector phases are an isotropy ambiguity the quotient norm ignores.
  const HermEig eig = herm_eig(0.5 * (c + c.adjoint()), 1e-8);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const RealVector& l = curve.b.lambdas();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return l(a) < l(b); });
  Matrix w(n, n);
  for (Index k = 0; k < n; ++k) w.col(order[k]) = eig.vectors.col(k);
  Matrix x = w.adjoint() * velocity * w;
  x = 0.5 * (x + x.adjoint());
  // Finite differences leave an O(h^2) diagonal; it is not part of the tangent.
  x.diagonal().setZero();
  return speed_from_pullback(x, curve.b, tol);
}

namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};

struct Quadrature {
  double value = 0.0;
  std::vector<double> times;
  std::vector<double> speeds;
};

Quadrature gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels) {
  Quadrature q;
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
      const double t = mid + 0.5 * width * kGaussNodes[k];
      double s;
      try {
        s = f(t);
      } catch (const Error& e) {
        throw Error(ErrorKind::convergence,
                    "curve_length: speed evaluation failed at t=" + std::to_string(t) + " (node " +
                        std::to_string(q.times.size()) + ", " + std::to_string(q.speeds.size()) +
                        " nodes done, partial integral " + std::to_string(q.value) + "): " + e.what(),
                    t);
      }
      q.times.push_back(t);
      q.speeds.push_back(s);
      q.value += 0.5 * width * kGaussWeights[k] * s;
    }
  }
  return q;
}

LengthReport integrate(const std::function<double(double)>& speed, double lo, double hi, const QuadratureConfig& cfg) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::invalid_input, "curve_length: interval must be finite");
  if (hi < lo) throw Error(ErrorKind::invalid_input, "curve_length: interval is reversed");
  if (cfg.panels < 1) throw Error(ErrorKind::config, "curve_length: panels must be positive");
  LengthReport r;
  if (hi == lo) return r;
  Quadrature coarse = gauss_legendre(speed, lo, hi, cfg.panels);
  const Quadrature fine = gauss_legendre(speed, lo, hi, 2 * cfg.panels);
  r.length = coarse.value;
  r.quadrature_nodes = static_cast<int>(coarse.times.size());
  r.node_times = std::move(coarse.times);
  r.per_node_speeds = std::move(coarse.speeds);
  r.est_error = std::abs(fine.value - coarse.value);
  return r;
}

}  // namespace

LengthReport curve_length(const GeodesicSpec& spec, const QuadratureConfig& cfg) {
  check_spec(spec);
  return integrate([&](double t) { return finsler_speed(spec, t, cfg.tol); }, spec.t_lo, spec.t_hi, cfg);
}

LengthReport curve_length(const GeneratorCurve& curve, const QuadratureConfig& cfg) {
  return integrate([&](double t) { return finsler_speed(curve, t, cfg.tol); }, curve.t_lo, curve.t_hi, cfg);
}

LengthReport curve_length(const SampledCurve& curve, const QuadratureConfig& cfg) {
  return integrate([&](double t) { return finsler_speed(curve, t, cfg.tol); }, curve.t_lo, curve.t_hi, cfg);
}

AntiHermitianMatrix transport_minimal(const AntiHermitianMatrix& k0, const AntiHermitianMatrix& z0) {
  if (k0.dim() != z0.dim()) throw Error(ErrorKind::dimension, "transport_minimal: dimension mismatch");
  const Matrix u = exp_ah(k0);
  return AntiHermitianMatrix::skew_part(u * z0.matrix() * u.adjoint());
}

std::pair<double, double> geodesic_interval(const AntiHermitianMatrix& z0) {
  const double norm = z0.norm();
  if (norm == 0.0) throw Error(ErrorKind::undefined_interval, "geodesic_interval: Z0 = 0 gives a stationary curve");
  const double half = std::numbers::pi / (2.0 * norm);
  return {-half, half};
}

double orbit_equality_residual(const AntiHermitianMatrix& k, const DiagonalAH& d, const DiagonalObservable& b) {
  if (k.dim() != b.dim() || d.dim() != b.dim())
    throw Error(ErrorKind::dimension, "orbit_equality_residual: dimension mismatch");
  const Matrix ek = exp_ah(k);
  const Matrix ed = d.exp();
  const Matrix bm = b.matrix();
  const Matrix lhs = ek * ed * bm * ed.adjoint() * ek.adjoint();
  const Matrix rhs = ek * bm * ek.adjoint();
  return spectral_norm(lhs - rhs);
}

bool verify_equal_quotient(const AntiHermitianMatrix& k1, const DiagonalAH& d1, const AntiHermitianMatrix& k2,
                           const DiagonalAH& d2, const std::vector<double>& t_samples) {
  const Index n = k1.dim();
  if (k2.dim() != n || d1.dim() != n || d2.dim() != n)
    throw Error(ErrorKind::dimension, "verify_equal_quotient: dimension mismatch");
  if (t_samples.empty()) throw Error(ErrorKind::invalid_input, "verify_equal_quotient: no t samples");
  double worst = 0.0;
  double worst_t = 0.0;
  for (double t : t_samples) {
    const double r = spectral_norm(exp_ah(k1 * t) * d1.exp() - exp_ah(k2 * t) * d2.exp());
    if (r > worst || std::isnan(r)) {
      worst = r;
      worst_t = t;
    }
  }
  if (!(worst < 1e-8))
    throw Error(ErrorKind::precondition,
                "verify_equal_quotient: product identity fails at t=" + std::to_string(worst_t), worst);
  const double q1 = mindiag::quotient_norm(k1).value;
  const double q2 = mindiag::quotient_norm(k2).value;
  return std::abs(q1 - q2) < 1e-6;
}

MinimalInequality verify_minimal_inequality(const AntiHermitianMatrix& k, const DiagonalAH& d) {
  if (k.dim() != d.dim()) throw Error(ErrorKind::dimension, "verify_minimal_inequality: dimension mismatch");
  const AntiHermitianMatrix sum = k + d.as_anti_hermitian();
  const double norm = sum.norm();
  if (!(norm < std::numbers::pi / 2.0 - 1e-6))
    throw Error(ErrorKind::precondition, "verify_minimal_inequality: ||K + D|| is not below pi/2", norm);
  const mindiag::QuotientSolution q_sum = mindiag::quotient_norm(sum);
  if (norm > q_sum.value + 1e-6)
    throw Error(ErrorKind::precondition, "verify_minimal_inequality: K + D is not minimal", norm - q_sum.value);

  const AntiHermitianMatrix k_prime = unitary_log(exp_ah(sum) * d.exp().adjoint(), 1e-9);
  const double lhs = mindiag::quotient_norm(k).value;
  const double rhs = mindiag::quotient_norm(k_prime).value;
  return {lhs, rhs, lhs <= rhs + 1e-6};
}

}  // namespace orbitgeo::geo
