#pragma once

#include <cstddef>
#include <vector>

#include "wbar/errors.hpp"

namespace wbar {

/// A point of the probability simplex: nonnegative weights summing to 1
/// within 1e-12. Immutable after construction.
class Histogram {
 public:
  Histogram() = default;

  /// Validates nonnegativity and |sum - 1| <= 1e-12.
  explicit Histogram(std::vector<double> weights);

  /// Rescales a nonnegative, nonzero vector onto the simplex.
  static Histogram normalized(std::vector<double> weights);

  static Histogram uniform(std::size_t n);
  static Histogram point_mass(std::size_t n, std::size_t i);

  /// p <- (1 - rho n) p + rho 1, renormalized; afterwards min_i p_i >= rho.
  Histogram floored(double rho) const;

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const double* data() const { return weights_.data(); }

  double min_weight() const;
  bool strictly_positive() const { return min_weight() > 0.0; }

 private:
  std::vector<double> weights_;
};

/// Symmetric nonnegative n x n ground-cost matrix, row-major, with the
/// operator infinity norm (max absolute row sum) cached.
class CostMatrix {
 public:
  CostMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  const double* row(std::size_t i) const { return entries_.data() + i * n_; }
  const double* data() const { return entries_.data(); }
  const std::vector<double>& entries() const { return entries_; }

  /// max_i sum_j |C_ij|
  double inf_norm() const { return inf_norm_; }
  /// max_ij C_ij
  double max_entry() const { return max_entry_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
  double inf_norm_ = 0.0;
  double max_entry_ = 0.0;
};

/// A coupling with prescribed marginals. Feasibility (l1 error of both
/// marginals against the targets) is checked at construction.
class TransportPlan {
 public:
  TransportPlan(std::vector<double> matrix, Histogram row_marginal,
                Histogram col_marginal, double tol_feas);

  std::size_t size() const { return row_marginal_.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return matrix_[i * size() + j];
  }
  const std::vector<double>& matrix() const { return matrix_; }
  const Histogram& row_marginal() const { return row_marginal_; }
  const Histogram& col_marginal() const { return col_marginal_; }

  /// l1 error of row marginal vs target plus l1 error of column marginal.
  double feasibility_error() const;

 private:
  std::vector<double> matrix_;
  Histogram row_marginal_;
  Histogram col_marginal_;
};

/// Dual variables of the marginal constraints in cost units. u is shifted to
/// zero mean; v absorbs the opposite shift so that <u,p> + <v,q> (and the
/// induced plan) is unchanged.
struct DualPotentials {
  std::vector<double> u;
  std::vector<double> v;

  DualPotentials() = default;
  DualPotentials(std::vector<double> u_raw, std::vector<double> v_raw);
};

struct ExactOtResult {
  double value = 0.0;
  TransportPlan plan;
  DualPotentials potentials;
};

struct EntropicOtResult {
  double value = 0.0;  // <C, plan> - gamma E(plan)
  TransportPlan plan;
  DualPotentials potentials;
  double gamma = 0.0;
  std::size_t iterations = 0;
  double marginal_error = 0.0;
};

namespace detail {
void require_same_dim(std::size_t a, std::size_t b, const char* what);
}

}  // namespace wbar
