#pragma once

#include <cstddef>
#include <vector>

#include "wbar/types.hpp"

// Exact and entropy-regularized optimal transport: values, plans, dual
// potentials, and (sub)gradients with respect to the first marginal.
namespace wbar::ot {

/// Exact OT by a dense transport simplex specialized to U(p, q). Returns the
/// optimal plan and tree-exact dual potentials (u zero-mean, v compensated).
ExactOtResult ot_exact(const Histogram& p, const Histogram& q,
                       const CostMatrix& C);

enum class SinkhornMode {
  auto_select,  // scaling unless ||C||_inf / gamma > 200, then log-domain
  scaling,
  log_domain,
};

struct SinkhornOptions {
  double tol = 1e-9;  // l1 marginal error at which the scaling stops
  std::size_t max_iter = 50000;
  SinkhornMode mode = SinkhornMode::auto_select;
};

/// Sinkhorn scaling for W_gamma(p, q). Requires strictly positive p, q
/// (floor upstream). Plain scaling throws NumericUnderflow when the kernel
/// degenerates; auto mode restarts in the log domain instead.
EntropicOtResult entropic_ot(const Histogram& p, const Histogram& q,
                             const CostMatrix& C, double gamma,
                             const SinkhornOptions& opts);

EntropicOtResult entropic_ot(const Histogram& p, const Histogram& q,
                             const CostMatrix& C, double gamma, double tol,
                             std::size_t max_iter);

/// Fenchel conjugate of W_gamma(., q) at u, evaluated in log-sum-exp form:
/// gamma (-<q, log q> + sum_j q_j log sum_i exp((u_i - C_ji)/gamma)).
double dual_value(const std::vector<double>& u, const Histogram& q,
                  const CostMatrix& C, double gamma);

/// Gradient of dual_value in u: a softmax mixture lying exactly on the
/// simplex (renormalized after the stable computation).
Histogram dual_gradient(const std::vector<double>& u, const Histogram& q,
                        const CostMatrix& C, double gamma);

/// Inexact subgradient of W_gamma w.r.t. p: the zero-mean Sinkhorn potential
/// u at marginal tolerance tol. The implied gradient precision is reported
/// as delta ~ tol * ||C||_inf / gamma (heuristic; validated empirically).
std::vector<double> entropic_ot_subgradient_p(const Histogram& p,
                                              const Histogram& q,
                                              const CostMatrix& C, double gamma,
                                              double tol);

/// Exact subgradient of W w.r.t. p: the zero-mean optimal dual u*.
std::vector<double> exact_ot_subgradient_p(const Histogram& p,
                                           const Histogram& q,
                                           const CostMatrix& C);

/// Checks W - 2 gamma log n <= W_gamma <= W with 1e-8 slack.
bool entropic_gap_bound(double ot_value, double entropic_value, double gamma,
                        std::size_t n);

/// Gradient-norm bound over the rho-floored simplex, evaluated verbatim:
/// sqrt(sum_j (2 gamma log n + inf_i sup_l |C_jl - C_il| - gamma log rho)^2).
double gradient_bound(const CostMatrix& C, double gamma, double rho);

/// Coarse estimate sqrt(n) ||C||_inf.
double gradient_bound_rough(const CostMatrix& C);

/// delta estimate for the tol -> gradient-precision mapping used by
/// entropic_ot_subgradient_p.
double subgradient_delta_estimate(const CostMatrix& C, double gamma,
                                  double tol);

}  // namespace wbar::ot
