#include "wbar/planner.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wbar::planner {
namespace {

constexpr const char* kConvention =
    "unit O-constants except the explicit 32/64 of the penalized ERM bounds; "
    "natural logs";

double logn(const PlannerInput& inp) {
  return std::log(static_cast<double>(inp.n));
}

std::string fmt(const char* pattern, double v) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return std::string(buf);
}

}  // namespace

void PlannerInput::validate() const {
  if (n < 2) throw std::invalid_argument("planner needs n >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(c_inf > 0.0)) throw std::invalid_argument("c_inf must be positive");
}

double PlannerInput::lipschitz() const {
  return lipschitz_mode == LipschitzMode::euclidean
             ? std::sqrt(static_cast<double>(n)) * c_inf
             : c_inf;
}

PlannerOutput plan_sa_entropic(const PlannerInput& inp, double gamma) {
  inp.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  PlannerOutput out;
  out.gamma = gamma;
  out.iterations =
      static_cast<double>(inp.n) * inp.c_inf * inp.c_inf / (gamma * inp.eps);
  out.delta = inp.eps;
  out.conf_radius_l2 = std::sqrt(2.0 * inp.eps / gamma);
  out.r2 = 0.0;
  out.convention = kConvention;
  out.complexity_notes = {complexity_report(inp, gamma)[0]};
  return out;
}

PlannerOutput plan_saa_entropic(const PlannerInput& inp, double gamma) {
  inp.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  PlannerOutput out;
  out.gamma = gamma;
  out.sample_size = static_cast<double>(inp.n) * inp.c_inf * inp.c_inf /
                    (inp.alpha * gamma * inp.eps);
  out.eps_prime = inp.eps * inp.eps * gamma /
                  (static_cast<double>(inp.n) * inp.c_inf * inp.c_inf);
  out.conf_radius_l2 = std::sqrt(2.0 * inp.eps / gamma);
  out.convention = kConvention;
  out.complexity_notes = {complexity_report(inp, gamma)[1]};
  return out;
}

double erm_sample_size(double M, double r2, double alpha, double eps) {
  return 32.0 * M * M * r2 / (alpha * eps * eps);
}

double erm_inner_precision(double M, double r2, double eps) {
  return eps * eps * eps / (64.0 * M * M * r2);
}

PlannerOutput plan_saa_penalized(const PlannerInput& inp) {
  inp.validate();
  const double r2d = logn(inp);  // R_d^2 = B_d(p*, p1) = O(log n) convention
  PlannerOutput out;
  out.lambda = inp.eps / (2.0 * r2d);
  out.sample_size = erm_sample_size(inp.c_inf, r2d, inp.alpha, inp.eps);
  out.eps_prime = erm_inner_precision(inp.c_inf, r2d, inp.eps);
  out.r2 = r2d;
  out.convention = kConvention;
  out.complexity_notes = {
      complexity_report(inp, inp.eps / (4.0 * r2d))[5]};
  return out;
}

SaUnregularizedPlan plan_sa_unregularized(const PlannerInput& inp) {
  inp.validate();
  SaUnregularizedPlan plan;

  // SGD path: gamma = eps/(2 R^2) with R^2 = 2 log n
  const double r2 = 2.0 * logn(inp);
  const double gamma = inp.eps / (2.0 * r2);
  plan.sgd = plan_sa_entropic(inp, gamma);
  plan.sgd.r2 = r2;
  plan.sgd.complexity_notes = {complexity_report(inp, gamma)[2],
                               complexity_report(inp, gamma)[3]};

  // MD path: N = c^2 log n / eps^2 and the fixed stepsize it implies
  plan.md_iterations = inp.c_inf * inp.c_inf * logn(inp) / (inp.eps * inp.eps);
  plan.md_eta = std::sqrt(2.0 * logn(inp)) /
                (inp.c_inf * std::sqrt(plan.md_iterations));
  return plan;
}

std::vector<std::string> complexity_report(const PlannerInput& inp,
                                           double gamma) {
  inp.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double n = static_cast<double>(inp.n);
  const double c = inp.c_inf;
  const double eps = inp.eps;
  const double n3c2_ge = n * n * n * c * c / (gamma * eps);
  const double ratio = c / gamma;

  std::vector<std::string> rows;
  rows.push_back(
      "entropic / projected SGD (SA): " + fmt("%.6g", n3c2_ge) +
      " * min{ exp(" + fmt("%.6g", ratio) + ")*(" + fmt("%.6g", ratio) +
      " + log(" + fmt("%.6g", c / (eps * eps)) + "/kappa)), sqrt(" +
      fmt("%.6g", n * c * c / (gamma * eps * eps)) + "/kappa) }"
      "   [n^3 c^2/(gamma eps) * min{exp(c/gamma)(c/gamma + log(c/(kappa "
      "eps^2))), sqrt(n c^2/(kappa gamma eps^2))}]");
  rows.push_back(
      "entropic / accelerated IBP (SAA): " +
      fmt("%.6g", n * n * n * n * std::pow(c, 4) / (gamma * gamma * eps * eps)) +
      "   [n^4 c^4/(gamma^2 eps^2)]");
  rows.push_back(
      "unregularized / projected SGD, gamma = eps/(4 log n) (SA): " +
      fmt("%.6g", n * n * n * std::sqrt(n) * std::pow(c, 3) /
                      (std::pow(eps, 3) * std::sqrt(eps))) +
      "/sqrt(kappa)   [n^3 sqrt(n) c^3/(eps^3 sqrt(eps kappa))]");
  rows.push_back("unregularized / stochastic MD (SA): " +
                 fmt("%.6g", n * n * n * c * c / (eps * eps)) +
                 "   [n^3 c^2/eps^2]");
  rows.push_back("unregularized / accelerated IBP, gamma = eps/(4 log n) "
                 "(SAA): " +
                 fmt("%.6g", n * n * n * n * std::pow(c, 4) / std::pow(eps, 4)) +
                 "   [n^4 c^4/eps^4]");
  rows.push_back("unregularized / mirror prox with Bregman penalty (SAA): " +
                 fmt("%.6g", n * n * std::sqrt(n) * std::pow(c, 5) /
                                 std::pow(eps, 5)) +
                 "   [n^2 sqrt(n) c^5/eps^5]");
  return rows;
}

}  // namespace wbar::planner
