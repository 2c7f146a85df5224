#include "wbar/sa.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "wbar/geometry.hpp"
#include "wbar/kernels.hpp"

namespace wbar::sa {
namespace {

namespace k = wbar::kernels;
using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return k::sum(v.data(), v.size()) / static_cast<double>(v.size());
}

struct Recorder {
  const EvalHooks& hooks;
  RunResult& result;
  Clock::time_point t0 = Clock::now();

  void record(std::size_t step, const Histogram& avg) {
    RunRecord rec;
    rec.k = step;
    rec.iterate_avg = avg;
    rec.obj_estimate = mean_of(result.round_values);
    if (hooks.truth && hooks.grid)
      rec.dist_to_truth_w2 =
          measures::w2_distance_1d(avg, *hooks.truth, *hooks.grid);
    if (!result.reference_values.empty()) {
      double reg = 0.0;
      for (std::size_t i = 0; i < result.round_values.size(); ++i)
        reg += result.round_values[i] - result.reference_values[i];
      rec.regret_partial = reg;
    } else {
      rec.regret_partial = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_ms = ms_since(t0);
    result.trace.push_back(std::move(rec));
  }
};

// uniform average of the post-update iterates, optionally restricted to
// the second half of the run
struct Averager {
  std::vector<double> sum;
  std::size_t count = 0;
  std::size_t start;  // first round included

  Averager(std::size_t n, std::size_t total, bool tail)
      : sum(n, 0.0), start(tail ? total / 2 + 1 : 1) {}

  void add(std::size_t round, const Histogram& p) {
    if (round < start) return;
    k::axpy(1.0, p.data(), sum.data(), sum.size());
    ++count;
  }

  Histogram value(const Histogram& fallback) const {
    if (count == 0) return fallback;
    std::vector<double> avg(sum.size());
    k::scale(avg.data(), sum.data(), 1.0 / static_cast<double>(count),
             sum.size());
    return Histogram::normalized(std::move(avg));
  }
};

Histogram take_next(MeasureStream& stream, std::size_t step, std::size_t total) {
  auto q = stream.next();
  if (!q)
    throw StreamExhausted("measure stream ended at round " +
                          std::to_string(step) + " of " +
                          std::to_string(total));
  return std::move(*q);
}

double eval_with_retry(FirstOrderOracle& oracle, const Histogram& p,
                       const Histogram& q, std::vector<double>& grad,
                       std::size_t& retries) {
  if (!oracle.has_retry()) return oracle.eval(p, q, grad);
  try {
    return oracle.eval(p, q, grad);
  } catch (const NonConvergence&) {
    ++retries;
    return oracle.eval_precise(p, q, grad);
  } catch (const NumericUnderflow&) {
    ++retries;
    return oracle.eval_precise(p, q, grad);
  }
}

}  // namespace

FixedStream::FixedStream(std::vector<Histogram> measures, bool cycle)
    : measures_(std::move(measures)), cycle_(cycle) {}

std::optional<Histogram> FixedStream::next() {
  if (pos_ >= measures_.size()) {
    if (!cycle_ || measures_.empty()) return std::nullopt;
    pos_ = 0;
  }
  return measures_[pos_++];
}

GaussianStream::GaussianStream(const measures::GaussianFamily& fam,
                               const measures::GridSpec& grid, double rho)
    : fam_(fam), grid_(grid), rho_(rho), rng_(fam.seed) {}

std::optional<Histogram> GaussianStream::next() {
  if (emitted_ >= fam_.count) return std::nullopt;
  ++emitted_;
  const double mean = rng_.uniform(fam_.mean_lo, fam_.mean_hi);
  const double stddev = rng_.uniform(fam_.std_lo, fam_.std_hi);
  return measures::discretize_gaussian(mean, stddev, grid_, rho_);
}

EntropicOtOracle::EntropicOtOracle(const CostMatrix& C, double gamma,
                                   double tol, std::size_t max_iter,
                                   double rho)
    : C_(C),
      gamma_(gamma),
      tol_(tol),
      max_iter_(max_iter),
      rho_(rho > 0.0 ? rho : measures::default_rho(C.size())) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
}

Histogram EntropicOtOracle::floored(const Histogram& h) const {
  return h.min_weight() >= rho_ ? h : h.floored(rho_);
}

double EntropicOtOracle::eval(const Histogram& p, const Histogram& q,
                              std::vector<double>& grad) {
  ot::SinkhornOptions opts;
  opts.tol = tol_;
  opts.max_iter = max_iter_;
  auto res = ot::entropic_ot(floored(p), floored(q), C_, gamma_, opts);
  grad = std::move(res.potentials.u);
  return res.value;
}

double EntropicOtOracle::eval_precise(const Histogram& p, const Histogram& q,
                                      std::vector<double>& grad) {
  ot::SinkhornOptions opts;
  opts.tol = tol_;
  opts.max_iter = 4 * max_iter_;
  opts.mode = ot::SinkhornMode::log_domain;
  auto res = ot::entropic_ot(floored(p), floored(q), C_, gamma_, opts);
  grad = std::move(res.potentials.u);
  return res.value;
}

double ExactOtOracle::eval(const Histogram& p, const Histogram& q,
                           std::vector<double>& grad) {
  auto res = ot::ot_exact(p, q, C_);
  grad = std::move(res.potentials.u);
  return res.value;
}

RunResult run_psgd(FirstOrderOracle& oracle, MeasureStream& stream,
                   const SaConfig& cfg, const Histogram& start,
                   const EvalHooks& hooks) {
  if (cfg.step_rule != StepRule::strongly_convex_1_over_gamma_k)
    throw std::invalid_argument("PSGD uses the 1/(gamma k) step rule");
  if (!(cfg.gamma > 0.0) && !cfg.eta_override)
    throw std::invalid_argument("PSGD needs gamma > 0");
  const std::size_t n = start.size();
  const std::size_t N = cfg.iterations;
  if (N < 1) throw std::invalid_argument("need at least one iteration");

  const std::size_t rec_every = cfg.record_every == 0 ? N : cfg.record_every;

  RunResult result;
  Recorder rec{hooks, result};

  Histogram p = start;
  std::vector<double> grad(n), step(n), scratch(n);
  Averager averager(n, N, cfg.tail_average);
  rec.record(0, p);

  for (std::size_t k_it = 1; k_it <= N; ++k_it) {
    const Histogram q = take_next(stream, k_it, N);
    const double value =
        eval_with_retry(oracle, p, q, grad, result.oracle_retries);
    result.round_values.push_back(value);
    if (hooks.regret_reference)
      result.reference_values.push_back(
          oracle.eval(*hooks.regret_reference, q, scratch));

    const double eta = cfg.eta_override
                           ? *cfg.eta_override
                           : 1.0 / (cfg.gamma * static_cast<double>(k_it));
    for (std::size_t i = 0; i < n; ++i) step[i] = p[i] - eta * grad[i];
    p = geometry::project_simplex(step);

    averager.add(k_it, p);
    if (k_it % rec_every == 0 || k_it == N)
      rec.record(k_it, averager.value(p));
  }

  result.output = averager.value(p);
  return result;
}

RunResult run_smd(FirstOrderOracle& oracle, MeasureStream& stream,
                  const SaConfig& cfg, double c_inf, const EvalHooks& hooks) {
  const std::size_t N = cfg.iterations;
  if (N < 1) throw std::invalid_argument("need at least one iteration");

  const std::size_t rec_every = cfg.record_every == 0 ? N : cfg.record_every;

  RunResult result;
  Recorder rec{hooks, result};

  // start at the prox-center of the simplex setup
  std::size_t n = 0;
  Histogram p;
  std::vector<double> grad, shifted, scratch;
  std::optional<Averager> averager;

  double eta = cfg.eta_override.value_or(0.0);

  for (std::size_t k_it = 1; k_it <= N; ++k_it) {
    Histogram q = take_next(stream, k_it, N);
    if (k_it == 1) {
      n = q.size();
      p = Histogram::uniform(n);
      grad.resize(n);
      shifted.resize(n);
      scratch.resize(n);
      averager.emplace(n, N, cfg.tail_average);
      if (!cfg.eta_override)
        eta = std::sqrt(2.0 * std::log(static_cast<double>(n))) /
              (c_inf * std::sqrt(static_cast<double>(N)));
      result.eta_used = eta;
      rec.record(0, p);
    }

    const double value =
        eval_with_retry(oracle, p, q, grad, result.oracle_retries);
    result.round_values.push_back(value);
    if (hooks.regret_reference)
      result.reference_values.push_back(
          oracle.eval(*hooks.regret_reference, q, scratch));

    // multiplicative update, max-shifted before exponentiation
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      shifted[i] = -eta * grad[i];
      if (shifted[i] > m) m = shifted[i];
    }
    std::vector<double> next(n);
    k::vexp_scaled(next.data(), shifted.data(), 1.0, -m, n);
    k::mul(next.data(), next.data(), p.data(), n);
    p = Histogram::normalized(std::move(next));

    averager->add(k_it, p);
    if (k_it % rec_every == 0 || k_it == N)
      rec.record(k_it, averager->value(p));
  }

  result.output = averager->value(p);
  return result;
}

RunResult run_psgd_wb(MeasureStream& stream, const CostMatrix& C,
                      const SaConfig& cfg, const EvalHooks& hooks,
                      const Histogram* start) {
  if (!(cfg.gamma > 0.0))
    throw std::invalid_argument("run_psgd_wb needs gamma > 0");
  EntropicOtOracle oracle(C, cfg.gamma, cfg.sinkhorn_tol,
                          cfg.sinkhorn_max_iter);
  const Histogram p1 = start ? *start : Histogram::uniform(C.size());
  RunResult result = run_psgd(oracle, stream, cfg, p1, hooks);
  result.delta_estimate =
      ot::subgradient_delta_estimate(C, cfg.gamma, cfg.sinkhorn_tol);
  return result;
}

RunResult run_smd_wb(MeasureStream& stream, const CostMatrix& C,
                     const SaConfig& cfg, const EvalHooks& hooks) {
  ExactOtOracle oracle(C);
  SaConfig md_cfg = cfg;
  md_cfg.step_rule = StepRule::md_fixed_eta;
  // the step's ||C||_inf is the entrywise sup norm: it is what bounds the
  // dual potentials' spread, hence the l_inf Lipschitz constant of W
  return run_smd(oracle, stream, md_cfg, C.max_entry(), hooks);
}

double empirical_regret(const std::vector<double>& round_values,
                        const std::vector<double>& reference_values) {
  if (reference_values.empty())
    throw MissingReference("regret needs per-round reference values");
  if (round_values.size() != reference_values.size())
    throw MissingReference("regret reference length mismatch");
  double reg = 0.0;
  for (std::size_t i = 0; i < round_values.size(); ++i)
    reg += round_values[i] - reference_values[i];
  return reg;
}

double empirical_regret(const RunResult& result) {
  return empirical_regret(result.round_values, result.reference_values);
}

}  // namespace wbar::sa
