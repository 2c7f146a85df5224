#include "wbar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wbar::geometry {

Histogram project_simplex(const std::vector<double>& w) {
  const std::size_t n = w.size();
  if (n == 0) throw std::invalid_argument("empty projection input");
  for (double x : w)
    if (!std::isfinite(x))
      throw std::invalid_argument("projection input must be finite");

  std::vector<double> r(w);
  std::stable_sort(r.begin(), r.end(), std::greater<double>());

  // largest j with r_j > (sum_{i<=j} r_i - 1)/j
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += r[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (r[j] - t > 0.0) theta = t;
  }

  std::vector<double> p(n);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::max(w[i] - theta, 0.0);
    mass += p[i];
  }
  // kill the O(eps) drift so downstream simplex invariants hold exactly
  for (double& x : p) x /= mass;
  return Histogram(std::move(p));
}

double kl_divergence(const Histogram& p, const Histogram& r) {
  detail::require_same_dim(p.size(), r.size(), "kl divergence");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (r[i] <= 0.0)
      throw UndefinedDivergence("KL undefined: reference weight is zero");
    acc += p[i] * std::log(p[i] / r[i]);
  }
  // the linear correction vanishes on the simplex but keeps the formula
  // valid for unnormalized callers
  double lin = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) lin += p[i] - r[i];
  return acc - lin;
}

BregmanPenalty::BregmanPenalty(Histogram reference)
    : reference_(std::move(reference)),
      a_(1.0 + 1.0 / (2.0 * std::log(static_cast<double>(reference_.size())))) {
  if (reference_.size() < 2)
    throw std::invalid_argument("penalty needs dimension >= 2");
  if (!reference_.strictly_positive())
    throw std::invalid_argument("penalty reference must be strictly positive");
  ref_value_ = value_raw(reference_.weights());
  ref_grad_ = grad_raw(reference_.weights());
}

double BregmanPenalty::value_raw(const std::vector<double>& p) const {
  double s = 0.0;
  for (double x : p) s += std::pow(x, a_);
  const double norm_a = std::pow(s, 1.0 / a_);
  return norm_a * norm_a / (2.0 * (a_ - 1.0));
}

std::vector<double> BregmanPenalty::grad_raw(const std::vector<double>& p) const {
  double s = 0.0;
  for (double x : p) s += std::pow(x, a_);
  const double norm_a = std::pow(s, 1.0 / a_);
  const double lead = std::pow(norm_a, 2.0 - a_) / (a_ - 1.0);
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    g[i] = lead * std::pow(p[i], a_ - 1.0);  // 0^{a-1} = 0 for a > 1
  return g;
}

double BregmanPenalty::prox_value(const Histogram& p) const {
  detail::require_same_dim(p.size(), size(), "penalty value");
  return value_raw(p.weights());
}

std::vector<double> BregmanPenalty::prox_grad(const Histogram& p) const {
  detail::require_same_dim(p.size(), size(), "penalty gradient");
  return grad_raw(p.weights());
}

double BregmanPenalty::bregman_div(const Histogram& p) const {
  detail::require_same_dim(p.size(), size(), "bregman divergence");
  double lin = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    lin += ref_grad_[i] * (p[i] - reference_[i]);
  const double b = value_raw(p.weights()) - ref_value_ - lin;
  return b < 0.0 ? 0.0 : b;  // clamp roundoff at p == reference
}

}  // namespace wbar::geometry
