#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wbar/measures.hpp"
#include "wbar/ot.hpp"
#include "wbar/types.hpp"

// Stochastic Approximation solvers: projected SGD for the entropic
// barycenter and entropic mirror descent for the unregularized one, each
// consuming one fresh measure per step.
namespace wbar::sa {

enum class StepRule {
  strongly_convex_1_over_gamma_k,  // eta_k = 1/(gamma k), PSGD path
  md_fixed_eta,                    // eta = sqrt(2 log n)/(||C||_inf sqrt(N))
};

struct SaConfig {
  double gamma = 0.0;  // > 0 required for the PSGD path
  std::size_t iterations = 100;
  double sinkhorn_tol = 1e-6;
  std::size_t sinkhorn_max_iter = 50000;
  StepRule step_rule = StepRule::strongly_convex_1_over_gamma_k;
  std::optional<double> eta_override;
  std::uint64_t seed = 0;  // echoed into metadata; streams own their seeds
  std::size_t record_every = 1;
  /// Average only the second half of the iterates (off by default: the
  /// analyzed estimator is the full uniform average).
  bool tail_average = false;
};

struct RunRecord {
  std::size_t k = 0;
  Histogram iterate_avg;
  double obj_estimate = 0.0;  // running mean of per-round objective values
  std::optional<double> dist_to_truth_w2;
  double regret_partial = 0.0;  // NaN when no reference was supplied
  std::int64_t wall_ms = 0;
};

/// Source of i.i.d. measures. Exhaustion before the iteration budget makes
/// the solver throw StreamExhausted.
class MeasureStream {
 public:
  virtual ~MeasureStream() = default;
  virtual std::optional<Histogram> next() = 0;
};

class FixedStream : public MeasureStream {
 public:
  explicit FixedStream(std::vector<Histogram> measures, bool cycle = false);
  std::optional<Histogram> next() override;

 private:
  std::vector<Histogram> measures_;
  bool cycle_;
  std::size_t pos_ = 0;
};

class GaussianStream : public MeasureStream {
 public:
  GaussianStream(const measures::GaussianFamily& fam,
                 const measures::GridSpec& grid, double rho);
  std::optional<Histogram> next() override;

 private:
  measures::GaussianFamily fam_;
  measures::GridSpec grid_;
  double rho_;
  measures::Rng rng_;
  std::size_t emitted_ = 0;
};

/// Stochastic first-order oracle: objective value and a subgradient of
/// f(p, q) with respect to p.
class FirstOrderOracle {
 public:
  virtual ~FirstOrderOracle() = default;
  virtual double eval(const Histogram& p, const Histogram& q,
                      std::vector<double>& grad) = 0;
  /// Fallback after a numeric failure; default: no second chance.
  virtual double eval_precise(const Histogram& p, const Histogram& q,
                              std::vector<double>& grad) {
    return eval(p, q, grad);
  }
  virtual bool has_retry() const { return false; }
};

/// W_gamma(p, q) with the zero-mean Sinkhorn potential as gradient. Inputs
/// touching the simplex boundary are floored by rho first (Sinkhorn needs
/// strictly positive marginals).
class EntropicOtOracle : public FirstOrderOracle {
 public:
  EntropicOtOracle(const CostMatrix& C, double gamma, double tol,
                   std::size_t max_iter, double rho = 0.0);  // 0 = 1e-6/n
  double eval(const Histogram& p, const Histogram& q,
              std::vector<double>& grad) override;
  double eval_precise(const Histogram& p, const Histogram& q,
                      std::vector<double>& grad) override;
  bool has_retry() const override { return true; }

 private:
  Histogram floored(const Histogram& h) const;

  const CostMatrix& C_;
  double gamma_;
  double tol_;
  std::size_t max_iter_;
  double rho_;
};

/// W(p, q) with the exact zero-mean dual optimizer as gradient.
class ExactOtOracle : public FirstOrderOracle {
 public:
  explicit ExactOtOracle(const CostMatrix& C) : C_(C) {}
  double eval(const Histogram& p, const Histogram& q,
              std::vector<double>& grad) override;

 private:
  const CostMatrix& C_;
};

struct EvalHooks {
  const Histogram* truth = nullptr;          // W2-to-truth trace column
  const measures::GridSpec* grid = nullptr;  // grid for the W2 evaluation
  const Histogram* regret_reference = nullptr;
};

struct RunResult {
  Histogram output;  // uniform average of the post-update iterates
  std::vector<RunRecord> trace;
  std::vector<double> round_values;      // f(p^k, q^k), one per round
  std::vector<double> reference_values;  // f(x*, q^k) when a reference is set
  double eta_used = 0.0;                 // MD only
  double delta_estimate = 0.0;           // PSGD only (tol -> delta heuristic)
  std::size_t oracle_retries = 0;
};

/// Projected SGD with eta_k = 1/(gamma k) on a generic oracle.
RunResult run_psgd(FirstOrderOracle& oracle, MeasureStream& stream,
                   const SaConfig& cfg, const Histogram& start,
                   const EvalHooks& hooks = {});

/// Entropic mirror descent with the fixed Algorithm-4 stepsize.
RunResult run_smd(FirstOrderOracle& oracle, MeasureStream& stream,
                  const SaConfig& cfg, double c_inf,
                  const EvalHooks& hooks = {});

/// PSGD bound to the entropic-OT subgradient oracle. cfg.gamma > 0.
RunResult run_psgd_wb(MeasureStream& stream, const CostMatrix& C,
                      const SaConfig& cfg, const EvalHooks& hooks = {},
                      const Histogram* start = nullptr);

/// SMD bound to the exact-OT subgradient oracle; starts uniform.
RunResult run_smd_wb(MeasureStream& stream, const CostMatrix& C,
                     const SaConfig& cfg, const EvalHooks& hooks = {});

/// Realized regret sum_k (f(x^k, xi^k) - f(x*, xi^k)). Throws
/// MissingReference when no reference values were recorded.
double empirical_regret(const std::vector<double>& round_values,
                        const std::vector<double>& reference_values);
double empirical_regret(const RunResult& result);

}  // namespace wbar::sa
