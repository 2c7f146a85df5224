#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wbar {

/// Inputs that are supposed to share a dimension do not.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The exact solver could not close the duality gap (degenerate input or
/// tolerance too tight).
struct InfeasibleNumerics : std::runtime_error {
  InfeasibleNumerics(std::string what, double gap_)
      : std::runtime_error(std::move(what)), gap(gap_) {}
  double gap;
};

/// An iterative scheme hit its budget before reaching the requested residual.
struct NonConvergence : std::runtime_error {
  NonConvergence(std::string what, std::size_t iterations_, double residual_)
      : std::runtime_error(std::move(what)),
        iterations(iterations_),
        residual(residual_) {}
  std::size_t iterations;
  double residual;
};

/// Plain Sinkhorn scaling underflowed; the log-domain path must be used.
struct NumericUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A measure source ran dry before the iteration budget was consumed.
struct StreamExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// KL(p, r) with some r_i = 0 where p_i > 0.
struct UndefinedDivergence : std::domain_error {
  using std::domain_error::domain_error;
};

/// A sampled density underflowed everywhere on the grid.
struct DegenerateMass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Regret was requested without a per-round reference.
struct MissingReference : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace wbar
