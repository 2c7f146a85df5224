#pragma once

#include <cstddef>
#include <vector>

#include "wbar/types.hpp"

// Simplex geometry primitives: Euclidean projection, KL divergence, and the
// a-norm prox function with its Bregman divergence (1-strongly convex in l1).
namespace wbar::geometry {

/// Euclidean projection onto the simplex by the sort/threshold rule.
Histogram project_simplex(const std::vector<double>& w);

/// <p, log(p/r)> - 1^T (p - r). Requires r_i > 0 wherever p_i > 0.
double kl_divergence(const Histogram& p, const Histogram& r);

/// d(p) = ||p||_a^2 / (2(a-1)) with a = 1 + 1/(2 log n), plus the Bregman
/// divergence B_d(p, reference). Strong convexity modulus 1 in the l1 norm.
class BregmanPenalty {
 public:
  explicit BregmanPenalty(Histogram reference);

  double exponent() const { return a_; }
  const Histogram& reference() const { return reference_; }
  std::size_t size() const { return reference_.size(); }

  double prox_value(const Histogram& p) const;
  std::vector<double> prox_grad(const Histogram& p) const;

  /// B_d(p, reference) = d(p) - d(ref) - <grad d(ref), p - ref>
  double bregman_div(const Histogram& p) const;

 private:
  double value_raw(const std::vector<double>& p) const;
  std::vector<double> grad_raw(const std::vector<double>& p) const;

  Histogram reference_;
  double a_;
  double ref_value_;
  std::vector<double> ref_grad_;
};

}  // namespace wbar::geometry
