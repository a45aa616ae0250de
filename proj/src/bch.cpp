#include "orbitgeo/bch.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace orbitgeo::bch {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Dynkin: log(e^X e^Y) = sum_k (-1)^{k-1}/k sum over (r_i, s_i), r_i + s_i >= 1,
//   1/(sum r_i + s_i) * [X^{r_1} Y^{s_1} ... X^{r_k} Y^{s_k}] / prod(r_i! s_i!)
// with [.] the right-nested bracket of the word. Weights are accumulated per
// word so that each bracket is evaluated once.
void enumerate(int order, int remaining, int pairs, std::uint32_t word, int pos, double inv_fact,
               std::map<std::uint32_t, double>& acc) {
  if (remaining == 0) {
    const double sign = (pairs % 2 == 1) ? 1.0 : -1.0;
    acc[word] += sign / pairs / order * inv_fact;
    return;
  }
  for (int m = 1; m <= remaining; ++m) {
    for (int r = 0; r <= m; ++r) {
      const int s = m - r;
      std::uint32_t w = word;
      for (int j = 0; j < s; ++j) w |= (1u << (pos + r + j));
      enumerate(order, remaining - m, pairs + 1, w, pos + m, inv_fact / (factorial(r) * factorial(s)), acc);
    }
  }
}

std::vector<DynkinWord> build_table(int order) {
  std::map<std::uint32_t, double> acc;
  enumerate(order, order, 0, 0u, 0, 1.0, acc);
  std::vector<DynkinWord> words;
  for (const auto& [w, c] : acc) {
    // Words whose last two letters agree have a vanishing bracket.
    if (order >= 2) {
      const bool a = (w >> (order - 1)) & 1u;
      const bool b = (w >> (order - 2)) & 1u;
      if (a == b) continue;
    }
    if (std::abs(c) > 1e-15) words.push_back({w, c});
  }
  return words;
}

Matrix nested_bracket(std::uint32_t word, int order, const Matrix& x, const Matrix& y) {
  auto letter = [&](int k) -> const Matrix& { return ((word >> k) & 1u) ? y : x; };
  Matrix acc = letter(order - 1);
  for (int k = order - 2; k >= 0; --k) {
    const Matrix& l = letter(k);
    acc = l * acc - acc * l;
  }
  return acc;
}

void check_pair(const AntiHermitianMatrix& x, const AntiHermitianMatrix& y) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::dimension, "bch: X and Y dimensions differ");
}

}  // namespace

const std::vector<DynkinWord>& dynkin_words(int order) {
  if (order < 1 || order > kMaxSupportedOrder)
    throw Error(ErrorKind::capability, "bch: unsupported order " + std::to_string(order));
  static std::array<std::vector<DynkinWord>, kMaxSupportedOrder + 1> tables;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int n = 1; n <= kMaxSupportedOrder; ++n) tables[n] = build_table(n);
  });
  return tables[order];
}

bool sufficiently_close(const AntiHermitianMatrix& x) { return x.norm() < kCloseBound; }

BchTerm bch_term(int order, const AntiHermitianMatrix& x, const AntiHermitianMatrix& y) {
  check_pair(x, y);
  const auto& words = dynkin_words(order);
  Matrix sum = Matrix::Zero(x.dim(), x.dim());
  for (const auto& w : words) sum += w.weight * nested_bracket(w.letters, order, x.matrix(), y.matrix());
  return {order, std::move(sum)};
}

BchResult bch_log(const AntiHermitianMatrix& x, const AntiHermitianMatrix& y, const BchConfig& cfg) {
  check_pair(x, y);
  if (cfg.max_order < 1 || cfg.max_order > kMaxSupportedOrder)
    throw Error(ErrorKind::capability, "bch: unsupported max_order " + std::to_string(cfg.max_order));
  if (cfg.guard == Guard::strict_log2) {
    const double total = x.norm() + y.norm();
    if (!(total < kConvergenceBound))
      throw Error(ErrorKind::precondition,
                  "bch: ||X|| + ||Y|| = " + std::to_string(total) + " violates the convergence bound log(2)/2",
                  total);
  }
  BchResult out{Matrix::Zero(x.dim(), x.dim()), 0.0, {}};
  for (int n = 1; n <= cfg.max_order; ++n) {
    BchTerm t = bch_term(n, x, y);
    const double norm = spectral_norm(t.value);
    out.term_norms.push_back(norm);
    out.truncation_estimate = norm;
    out.value += t.value;
  }
  return out;
}

Matrix exp_splitting_defect(const AntiHermitianMatrix& s0, const DiagonalAH& d0) {
  if (s0.dim() != d0.dim()) throw Error(ErrorKind::dimension, "exp_splitting_defect: dimension mismatch");
  return exp_ah(s0 + d0.as_anti_hermitian()) - d0.exp();
}

double scalar_shift_identity_check(const AntiHermitianMatrix& k, const DiagonalAH& d, double lambda_im) {
  if (k.dim() != d.dim()) throw Error(ErrorKind::dimension, "scalar_shift_identity_check: dimension mismatch");
  const Index n = k.dim();
  const Matrix ek = exp_ah(k);
  const Matrix shift = std::polar(1.0, -lambda_im) * Matrix::Identity(n, n);
  const Matrix lhs = ek * d.exp() * shift;
  const DiagonalAH shifted(d.phases() - RealVector::Constant(n, lambda_im));
  const Matrix rhs = ek * shifted.exp();
  return spectral_norm(lhs - rhs);
}

}  // namespace orbitgeo::bch
