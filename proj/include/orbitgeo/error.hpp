#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orbitgeo {

enum class ErrorKind {
  invalid_input,
  structure,
  dimension,
  capability,
  precondition,
  convergence,
  conditioning,
  not_tangent,
  degenerate_factorization,
  out_of_neighborhood,
  boundary,
  undefined_interval,
  format,
  config,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. `measured` carries the offending
// quantity when there is one (guard sums, residuals, best iterates).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> measured = std::nullopt)
      : std::runtime_error(what), kind_(kind), measured_(measured) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> measured() const noexcept { return measured_; }

 private:
  ErrorKind kind_;
  std::optional<double> measured_;
};

}  // namespace orbitgeo
