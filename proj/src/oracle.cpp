#include "orbitgeo/minimal_diag.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace orbitgeo::mindiag {

// Brute force: coarse grid over the box that must contain a minimiser, then
// Nelder-Mead from the best grid points, restarted a few times because the
// objective is not smooth at the optimum.

namespace {

struct OracleProblem {
  Matrix z;
};

double objective(const OracleProblem& p, const double* d) {
  Matrix m = p.z;
  for (Index j = 0; j < m.rows(); ++j) m(j, j) += Complex(0.0, d[j]);
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double gsl_objective(const gsl_vector* v, void* params) {
  return objective(*static_cast<const OracleProblem*>(params), v->data);
}

std::pair<double, std::vector<double>> nelder_mead(const OracleProblem& p, std::vector<double> start, double step) {
  const std::size_t n = start.size();
  gsl_multimin_function fn{&gsl_objective, n, const_cast<OracleProblem*>(&p)};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

  double best = objective(p, start.data());
  for (int restart = 0; restart < 6; ++restart) {
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, start[i]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12) == GSL_SUCCESS) break;
    }
    const double v = s->fval;
    const bool improved = v < best - 1e-13;
    if (v < best) {
      best = v;
      for (std::size_t i = 0; i < n; ++i) start[i] = gsl_vector_get(s->x, i);
    }
    if (!improved && restart > 0) break;
    step *= 0.1;
  }

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return {best, start};
}

}  // namespace

double oracle_quotient_norm(const AntiHermitianMatrix& z, Index n_cap) {
  const Index n = z.dim();
  if (n > n_cap)
    throw Error(ErrorKind::capability,
                "oracle_quotient_norm: n=" + std::to_string(n) + " exceeds cap " + std::to_string(n_cap));
  if (n == 0) return 0.0;
  const OracleProblem p{z.matrix()};
  const double r = 2.0 * z.norm();
  if (r == 0.0) return 0.0;

  constexpr int kPoints = 9;
  const double h = 2.0 * r / (kPoints - 1);
  std::vector<std::pair<double, std::vector<double>>> grid;
  std::vector<int> idx(n, 0);
  std::vector<double> d(n);
  for (;;) {
    for (Index j = 0; j < n; ++j) d[j] = -r + h * idx[j];
    grid.emplace_back(objective(p, d.data()), d);
    Index j = 0;
    while (j < n && ++idx[j] == kPoints) idx[j++] = 0;
    if (j == n) break;
  }
  const std::size_t keep = std::min<std::size_t>(5, grid.size());
  std::partial_sort(grid.begin(), grid.begin() + keep, grid.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });

  gsl_error_handler_t* old = gsl_set_error_handler_off();
  double best = grid.front().first;
  for (std::size_t k = 0; k < keep; ++k) best = std::min(best, nelder_mead(p, grid[k].second, h).first);
  gsl_set_error_handler(old);
  return best;
}

}  // namespace orbitgeo::mindiag
