#include "wbar/types.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wbar/kernels.hpp"

namespace wbar {

namespace detail {
void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(a) +
                            " vs " + std::to_string(b));
}
}  // namespace detail

Histogram::Histogram(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("empty histogram");
  double s = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("negative histogram weight");
    s += w;
  }
  if (std::fabs(s - 1.0) > 1e-12)
    throw std::invalid_argument("histogram mass " + std::to_string(s) +
                                " not 1 within 1e-12");
}

Histogram Histogram::normalized(std::vector<double> weights) {
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("negative histogram weight");
    s += w;
  }
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("histogram mass not positive finite");
  for (double& w : weights) w /= s;
  return Histogram(std::move(weights));
}

Histogram Histogram::uniform(std::size_t n) {
  return Histogram::normalized(std::vector<double>(n, 1.0));
}

Histogram Histogram::point_mass(std::size_t n, std::size_t i) {
  std::vector<double> w(n, 0.0);
  w.at(i) = 1.0;
  return Histogram(std::move(w));
}

Histogram Histogram::floored(double rho) const {
  const std::size_t n = size();
  if (!(rho > 0.0) || rho * static_cast<double>(n) >= 1.0)
    throw std::invalid_argument("floor rho must satisfy 0 < rho n < 1");
  std::vector<double> w(n);
  const double keep = 1.0 - rho * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = keep * weights_[i] + rho;
  return Histogram::normalized(std::move(w));
}

double Histogram::min_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (double w : weights_)
    if (w < m) m = w;
  return m;
}

CostMatrix::CostMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0 || entries_.size() != n_ * n_)
    throw std::invalid_argument("cost matrix storage does not match n^2");
  for (std::size_t i = 0; i < n_; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double c = entries_[i * n_ + j];
      if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("cost entries must be finite nonnegative");
      if (std::fabs(c - entries_[j * n_ + i]) > 1e-12)
        throw std::invalid_argument("cost matrix not symmetric within 1e-12");
      row_sum += c;
      if (c > max_entry_) max_entry_ = c;
    }
    if (row_sum > inf_norm_) inf_norm_ = row_sum;
  }
}

TransportPlan::TransportPlan(std::vector<double> matrix, Histogram row_marginal,
                             Histogram col_marginal, double tol_feas)
    : matrix_(std::move(matrix)),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)) {
  const std::size_t n = row_marginal_.size();
  detail::require_same_dim(n, col_marginal_.size(), "transport plan marginals");
  if (matrix_.size() != n * n)
    throw DimensionMismatch("transport plan storage does not match n^2");
  for (double x : matrix_)
    if (!(x >= -1e-15))
      throw std::invalid_argument("transport plan has negative entries");
  for (double& x : matrix_)
    if (x < 0.0) x = 0.0;
  const double err = feasibility_error();
  if (err > tol_feas)
    throw std::invalid_argument("transport plan marginal error " +
                                std::to_string(err) + " exceeds tolerance");
}

double TransportPlan::feasibility_error() const {
  const std::size_t n = size();
  std::vector<double> ones(n, 1.0), r(n), c(n);
  kernels::matvec(matrix_.data(), n, n, ones.data(), r.data());
  kernels::matvec_t(matrix_.data(), n, n, ones.data(), c.data());
  return kernels::l1_diff(r.data(), row_marginal_.data(), n) +
         kernels::l1_diff(c.data(), col_marginal_.data(), n);
}

DualPotentials::DualPotentials(std::vector<double> u_raw,
                               std::vector<double> v_raw)
    : u(std::move(u_raw)), v(std::move(v_raw)) {
  detail::require_same_dim(u.size(), v.size(), "dual potentials");
  const double c =
      kernels::sum(u.data(), u.size()) / static_cast<double>(u.size());
  for (double& x : u) x -= c;
  for (double& x : v) x += c;
}

}  // namespace wbar
