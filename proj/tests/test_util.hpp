#pragma once

#include <optional>

#include "orbitgeo/error.hpp"
#include "orbitgeo/linalg.hpp"

namespace testutil {

// Kind of the orbitgeo::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<orbitgeo::ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const orbitgeo::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline orbitgeo::Matrix mat2(orbitgeo::Complex a, orbitgeo::Complex b, orbitgeo::Complex c, orbitgeo::Complex d) {
  orbitgeo::Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Truncated Taylor series, an exponential independent of the eigensolver path.
inline orbitgeo::Matrix taylor_exp(const orbitgeo::Matrix& x, int terms = 60) {
  const auto n = x.rows();
  orbitgeo::Matrix sum = orbitgeo::Matrix::Identity(n, n);
  orbitgeo::Matrix term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace testutil
