#include "orbitgeo/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace orbitgeo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::structure: return "structure";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::capability: return "capability";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::not_tangent: return "not-tangent";
    case ErrorKind::degenerate_factorization: return "degenerate-factorization";
    case ErrorKind::out_of_neighborhood: return "out-of-neighborhood";
    case ErrorKind::boundary: return "boundary";
    case ErrorKind::undefined_interval: return "undefined-interval";
    case ErrorKind::format: return "format";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

bool all_finite(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::dimension, std::string(what) + ": matrix is not square (" +
                                          std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()) + ")");
}

double spectral_norm(const Matrix& a) {
  require_square(a, "spectral_norm");
  if (!all_finite(a)) throw Error(ErrorKind::invalid_input, "spectral_norm: non-finite entry");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double hermitian_norm(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::dimension, "commutator: dimension mismatch");
  return a * b - b * a;
}

Matrix diag_part(const Matrix& a) {
  Matrix d = Matrix::Zero(a.rows(), a.cols());
  d.diagonal() = a.diagonal();
  return d;
}

Matrix off_diag_part(const Matrix& a) {
  Matrix o = a;
  o.diagonal().setZero();
  return o;
}

double unitarity_defect(const Matrix& u) {
  require_square(u, "unitarity_defect");
  const Matrix e = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return hermitian_norm(e);
}

// ---------------------------------------------------------------------------

AntiHermitianMatrix::AntiHermitianMatrix(Matrix a, double structure_tol)
    : a_(std::move(a)), tol_(structure_tol) {
  require_square(a_, "AntiHermitianMatrix");
  if (!all_finite(a_)) throw Error(ErrorKind::invalid_input, "AntiHermitianMatrix: non-finite entry");
  const Matrix sym = a_ + a_.adjoint();
  const double defect = hermitian_norm(sym);
  if (defect > tol_ * spectral_norm(a_))
    throw Error(ErrorKind::structure, "matrix is not anti-Hermitian within tolerance", defect);
}

AntiHermitianMatrix AntiHermitianMatrix::skew_part(const Matrix& a) {
  require_square(a, "skew_part");
  if (!all_finite(a)) throw Error(ErrorKind::invalid_input, "skew_part: non-finite entry");
  Matrix s = 0.5 * (a - a.adjoint());
  return AntiHermitianMatrix(std::move(s), kDefaultStructureTol, Trusted{});
}

AntiHermitianMatrix AntiHermitianMatrix::zero(Index n) {
  return AntiHermitianMatrix(Matrix::Zero(n, n), kDefaultStructureTol, Trusted{});
}

AntiHermitianMatrix AntiHermitianMatrix::operator+(const AntiHermitianMatrix& o) const {
  if (dim() != o.dim()) throw Error(ErrorKind::dimension, "anti-Hermitian sum: dimension mismatch");
  return AntiHermitianMatrix(a_ + o.a_, tol_, Trusted{});
}

AntiHermitianMatrix AntiHermitianMatrix::operator-(const AntiHermitianMatrix& o) const {
  if (dim() != o.dim()) throw Error(ErrorKind::dimension, "anti-Hermitian difference: dimension mismatch");
  return AntiHermitianMatrix(a_ - o.a_, tol_, Trusted{});
}

AntiHermitianMatrix AntiHermitianMatrix::operator*(double s) const {
  return AntiHermitianMatrix(a_ * s, tol_, Trusted{});
}

AntiHermitianMatrix AntiHermitianMatrix::operator-() const {
  return AntiHermitianMatrix(-a_, tol_, Trusted{});
}

// ---------------------------------------------------------------------------

double wrap_phase(double theta) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(theta, 2.0 * pi);  // [-pi, pi]
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

DiagonalAH::DiagonalAH(RealVector phases) : phases_(std::move(phases)) {
  for (Index j = 0; j < phases_.size(); ++j)
    if (!std::isfinite(phases_(j))) throw Error(ErrorKind::invalid_input, "DiagonalAH: non-finite phase");
}

DiagonalAH DiagonalAH::from_diagonal_of(const Matrix& a) {
  return DiagonalAH(a.diagonal().imag());
}

Matrix DiagonalAH::matrix() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Index j = 0; j < dim(); ++j) m(j, j) = Complex(0.0, phases_(j));
  return m;
}

AntiHermitianMatrix DiagonalAH::as_anti_hermitian() const {
  return AntiHermitianMatrix::skew_part(matrix());
}

Matrix DiagonalAH::exp() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Index j = 0; j < dim(); ++j) m(j, j) = std::polar(1.0, phases_(j));
  return m;
}

double DiagonalAH::norm() const {
  return dim() == 0 ? 0.0 : phases_.cwiseAbs().maxCoeff();
}

DiagonalAH DiagonalAH::wrapped() const {
  RealVector w = phases_;
  for (Index j = 0; j < w.size(); ++j) w(j) = wrap_phase(w(j));
  return DiagonalAH(std::move(w));
}

DiagonalAH DiagonalAH::operator+(const DiagonalAH& o) const {
  if (dim() != o.dim()) throw Error(ErrorKind::dimension, "diagonal sum: dimension mismatch");
  return DiagonalAH(phases_ + o.phases_);
}

DiagonalAH DiagonalAH::operator-(const DiagonalAH& o) const {
  if (dim() != o.dim()) throw Error(ErrorKind::dimension, "diagonal difference: dimension mismatch");
  return DiagonalAH(phases_ - o.phases_);
}

DiagonalAH DiagonalAH::operator-() const { return DiagonalAH(-phases_); }

DiagonalAH DiagonalAH::operator*(double s) const { return DiagonalAH(phases_ * s); }

// ---------------------------------------------------------------------------

HermEig herm_eig(const Matrix& h, double structure_tol) {
  require_square(h, "herm_eig");
  if (!all_finite(h)) throw Error(ErrorKind::invalid_input, "herm_eig: non-finite entry");
  const Matrix skew = h - h.adjoint();
  const double defect = hermitian_norm(Complex(0.0, 1.0) * skew);
  if (defect > structure_tol * std::max(1.0, spectral_norm(h)))
    throw Error(ErrorKind::structure, "herm_eig: matrix is not Hermitian within tolerance", defect);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix exp_ah(const AntiHermitianMatrix& x) {
  const Index n = x.dim();
  if (n == 0) return Matrix(0, 0);
  // -iX is Hermitian; e^X = V diag(e^{i lambda}) V*.
  const Matrix h = Complex(0.0, -1.0) * x.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Matrix& v = es.eigenvectors();
  Eigen::VectorXcd phases(n);
  for (Index k = 0; k < n; ++k) phases(k) = std::polar(1.0, es.eigenvalues()(k));
  return v * phases.asDiagonal() * v.adjoint();
}

namespace {

// (log z_l - log z_k) / (z_l - z_k) for unit-modulus z = e^{i theta}.
Complex log_divided_difference(double theta_k, double theta_l) {
  const double delta = theta_l - theta_k;
  const double mid = 0.5 * (theta_k + theta_l);
  const double half = 0.5 * delta;
  const double s = std::sin(half);
  if (std::abs(half) < 1e-8) return std::polar(1.0, -mid);
  // Eigenvalues on either side of the branch cut at -1: no finite correction.
  if (std::abs(delta) > std::numbers::pi && std::abs(s) < 1e-6) return {0.0, 0.0};
  return std::polar(half / s, -mid);
}

}  // namespace

AntiHermitianMatrix unitary_log(const Matrix& u, double unitary_tol) {
  require_square(u, "unitary_log");
  if (!all_finite(u)) throw Error(ErrorKind::invalid_input, "unitary_log: non-finite entry");
  const Index n = u.rows();
  if (n == 0) return AntiHermitianMatrix::zero(0);
  const double defect = unitarity_defect(u);
  if (defect > unitary_tol)
    throw Error(ErrorKind::structure, "unitary_log: matrix is not unitary within tolerance", defect);

  constexpr double pi = std::numbers::pi;
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();

  RealVector theta(n);
  for (Index k = 0; k < n; ++k) {
    double th = std::arg(t(k, k));
    if (th <= -pi + 8.0 * std::numeric_limits<double>::epsilon() * pi) th = pi;
    theta(k) = th;
  }

  // Triangular log: phases on the diagonal plus the first-order Parlett term
  // for the (tiny) strictly upper part left over by the Schur reduction of a
  // normal matrix.
  Matrix l = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    l(k, k) = Complex(0.0, theta(k));
    for (Index j = k + 1; j < n; ++j) l(k, j) = t(k, j) * log_divided_difference(theta(k), theta(j));
  }
  return AntiHermitianMatrix::skew_part(q * l * q.adjoint());
}

TailProfile tail_norm_profile(const Matrix& a, std::span<const Index> cuts) {
  require_square(a, "tail_norm_profile");
  const Index n = a.rows();
  TailProfile out;
  Index prev = -1;
  for (Index m : cuts) {
    if (m < 0 || m >= n)
      throw Error(ErrorKind::invalid_input,
                  "tail_norm_profile: cut " + std::to_string(m) + " out of range for n=" + std::to_string(n));
    if (m <= prev) throw Error(ErrorKind::invalid_input, "tail_norm_profile: cuts must be strictly increasing");
    prev = m;
    Matrix tail = a;
    tail.topLeftCorner(m, m).setZero();
    out.cut_indices.push_back(m);
    out.tail_norms.push_back(spectral_norm(tail));
  }
  return out;
}

}  // namespace orbitgeo
