#include "orbitgeo/minimal_diag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace orbitgeo::mindiag {

// The objective g(d) = ||H + diag(d)||, H = -iZ, is convex but not smooth at
// the minimiser (the extreme eigenvalues coalesce). It is replaced by the
// log-sum-exp smoothing
//   f_mu(d) = mu * log sum_k (exp(s_k/mu) + exp(-s_k/mu)),  s = eig(H + diag d),
// with g <= f_mu <= g + mu*log(2n), minimised by damped Newton while mu is
// driven to zero. The softmax weights at each stage give a Hermitian W whose
// off-diagonal part is dual feasible, so every stage yields a certified
// lower bound; the solve stops when value - bound <= tol.

namespace {

struct Stage {
  double f = 0.0;
  double g = 0.0;  // max |s_k|
  RealVector grad;
  Eigen::MatrixXd hess;
  RealVector sigma;
  Matrix v;
  RealVector w;  // signed softmax weights, sum |w_k| <= 1
};

// Divided difference of x -> exp((x - c)/mu) at a, b.
double exp_divided_difference(double a, double b, double c, double mu) {
  const double z = (a - b) / (2.0 * mu);
  if (std::abs(z) > 20.0) return (std::exp((a - c) / mu) - std::exp((b - c) / mu)) / (a - b);
  const double m = 0.5 * (a + b);
  const double sinhc = std::abs(z) < 1e-8 ? 1.0 + z * z / 6.0 : std::sinh(z) / z;
  return std::exp((m - c) / mu) * sinhc / mu;
}

Stage evaluate(const Matrix& h, const RealVector& d, double mu, bool with_hessian) {
  const Index n = h.rows();
  Matrix a = h;
  for (Index i = 0; i < n; ++i) a(i, i) += d(i);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Stage st;
  st.sigma = es.eigenvalues();
  st.v = es.eigenvectors();
  const double c = std::max(std::abs(st.sigma(0)), std::abs(st.sigma(n - 1)));
  st.g = c;

  RealVector ep(n), em(n);
  for (Index k = 0; k < n; ++k) {
    ep(k) = std::exp((st.sigma(k) - c) / mu);
    em(k) = std::exp((-st.sigma(k) - c) / mu);
  }
  const double s = ep.sum() + em.sum();
  st.f = c + mu * std::log(s);
  st.w = (ep - em) / s;
  const Eigen::MatrixXd mod2 = st.v.cwiseAbs2();
  st.grad = mod2 * st.w;

  if (with_hessian) {
    // M_ij = sum_kl Gamma_kl Re(conj(V_ik) V_il V_jk conj(V_jl)), Gamma >= 0.
    Matrix b(n, n * n);
    for (Index k = 0; k < n; ++k) {
      for (Index l = 0; l < n; ++l) {
        const double gamma = (exp_divided_difference(st.sigma(k), st.sigma(l), c, mu) +
                              exp_divided_difference(-st.sigma(k), -st.sigma(l), c, mu)) /
                             s;
        const double root = std::sqrt(std::max(gamma, 0.0));
        for (Index i = 0; i < n; ++i) b(i, k * n + l) = root * std::conj(st.v(i, k)) * st.v(i, l);
      }
    }
    st.hess = (b * b.adjoint()).real() - st.grad * st.grad.transpose() / mu;
  }
  return st;
}

double smoothed_value(const Matrix& h, const RealVector& d, double mu) {
  const Index n = h.rows();
  Matrix a = h;
  for (Index i = 0; i < n; ++i) a(i, i) += d(i);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const RealVector& sg = es.eigenvalues();
  const double c = std::max(std::abs(sg(0)), std::abs(sg(n - 1)));
  double s = 0.0;
  for (Index k = 0; k < n; ++k) s += std::exp((sg(k) - c) / mu) + std::exp((-sg(k) - c) / mu);
  return c + mu * std::log(s);
}

double lower_bound_from_weights(const Matrix& h, const Stage& st) {
  Matrix w = st.v * st.w.cast<Complex>().asDiagonal() * st.v.adjoint();
  w.diagonal().setZero();
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  if (trace_norm <= 0.0) return 0.0;
  return std::max(0.0, (h * w).trace().real() / trace_norm);
}

}  // namespace

double dual_lower_bound(const AntiHermitianMatrix& z, const Matrix& w) {
  if (w.rows() != z.dim() || w.cols() != z.dim())
    throw Error(ErrorKind::dimension, "dual_lower_bound: dimension mismatch");
  Matrix w0 = 0.5 * (w + w.adjoint());
  w0.diagonal().setZero();
  Eigen::SelfAdjointEigenSolver<Matrix> es(w0, Eigen::EigenvaluesOnly);
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  if (trace_norm <= 0.0) return 0.0;
  const Matrix h = Complex(0.0, -1.0) * z.matrix();
  return (h * w0).trace().real() / trace_norm;
}

QuotientSolution quotient_norm(const AntiHermitianMatrix& z, const QuotientOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::invalid_input, "quotient_norm: tol must be positive");
  const Index n = z.dim();
  QuotientSolution sol;
  if (n == 0) {
    sol.best_diagonal = DiagonalAH::zero(0);
    return sol;
  }

  const Matrix h = Complex(0.0, -1.0) * z.matrix();  // Hermitian
  // Start by cancelling the diagonal, which is optimal when Z is diagonal.
  RealVector d = -h.diagonal().real();
  Matrix off = h;
  off.diagonal().setZero();
  const double scale = hermitian_norm(off);

  auto finish = [&](const RealVector& best_d, double lower) {
    sol.best_diagonal = DiagonalAH(best_d);
    sol.value = spectral_norm(z.matrix() + sol.best_diagonal.matrix());
    sol.lower_bound = std::min(lower, sol.value);
    sol.certificate_gap = sol.value - sol.lower_bound;
    return sol;
  };

  if (scale == 0.0) return finish(d, 0.0);

  RealVector best_d = d;
  double best_value = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  int iterations = 0;
  const double mu_floor = 1e-14 * scale;

  for (double mu = 0.1 * scale; mu >= mu_floor; mu *= 0.25) {
    // Damped Newton on f_mu.
    int stage_steps = 0;
    for (;;) {
      Stage st = evaluate(h, d, mu, true);
      if (st.g < best_value) {
        best_value = st.g;
        best_d = d;
      }
      best_lower = std::max(best_lower, lower_bound_from_weights(h, st));
      if (best_value - best_lower <= opts.tol) {
        sol.iterations = iterations;
        return finish(best_d, best_lower);
      }
      if (iterations >= opts.iteration_cap)
        throw Error(ErrorKind::convergence,
                    fmt::format("quotient_norm: iteration cap reached (best value {:.17g}, certified gap {:.3e})",
                                best_value, best_value - best_lower),
                    best_value);
      ++iterations;

      const double ridge = 1e-13 * std::max(1.0, st.hess.diagonal().cwiseAbs().maxCoeff());
      Eigen::MatrixXd reg = st.hess;
      reg.diagonal().array() += ridge;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
      RealVector step = ldlt.solve(-st.grad);
      double slope = st.grad.dot(step);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || !(slope < 0.0)) {
        step = -st.grad;
        slope = st.grad.dot(step);
      }
      const double step_max = step.cwiseAbs().maxCoeff();
      if (step_max > scale) {
        step *= scale / step_max;
        slope *= scale / step_max;
      }
      // The certificate needs diag(W) = grad to vanish, so each stage is
      // solved to a tiny gradient; Newton converges quadratically there.
      if (st.grad.cwiseAbs().maxCoeff() <= 1e-13 || ++stage_steps > 60) break;

      // Near the stage minimiser the predicted decrease is below the rounding
      // of f itself; the slack lets full Newton steps through there.
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(st.f);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const RealVector trial = d + t * step;
        if (trial == d) break;
        if (smoothed_value(h, trial, mu) <= st.f + 0.25 * t * slope + slack) {
          d = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  throw Error(ErrorKind::convergence,
              fmt::format("quotient_norm: smoothing floor reached before the certified gap met tol (best value "
                          "{:.17g}, gap {:.3e})",
                          best_value, best_value - best_lower),
              best_value);
}

bool is_minimal(const AntiHermitianMatrix& z, double tol) {
  const QuotientSolution q = quotient_norm(z, QuotientOptions{std::min(tol, kDefaultTol), kDefaultIterationCap});
  return z.norm() <= q.value + tol;
}

}  // namespace orbitgeo::mindiag
