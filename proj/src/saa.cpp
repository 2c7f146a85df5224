#include "wbar/saa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "wbar/kernels.hpp"

namespace wbar::saa {
namespace {

namespace k = wbar::kernels;
using Clock = std::chrono::steady_clock;

constexpr double kLogDomainRatio = 200.0;

void check_samples(const std::vector<Histogram>& samples, const CostMatrix& C) {
  if (samples.empty()) throw std::invalid_argument("need at least one sample");
  for (const Histogram& q : samples)
    detail::require_same_dim(q.size(), C.size(), "sample vs cost matrix");
}

// IBP stop rule: the empirical objective is Lipschitz in l1 with constant on
// the order of the largest cost entry, so iterate movement below
// eps'/(8 max(1, ||C||_max)) certifies the eps' contract once the linear
// convergence regime is reached.
double ibp_stop_tol(double eps_prime, const CostMatrix& C) {
  return eps_prime / (8.0 * std::max(1.0, C.max_entry()));
}

struct IbpLogState {
  // per-sample scalings in log form, vectors of length m*n
  std::vector<double> f, g, s, t, logq;
};

}  // namespace

void SaaConfig::validate() const {
  if (m < 1) throw std::invalid_argument("need at least one sample");
  if (!(eps_prime > 0.0))
    throw std::invalid_argument("eps_prime must be positive");
  const bool ibp = gamma > 0.0, penalized = lambda > 0.0;
  if (ibp == penalized)
    throw std::invalid_argument(
        "exactly one of gamma > 0 (IBP) or lambda > 0 (penalized) must be set");
}

IbpResult run_ibp_barycenter(const std::vector<Histogram>& samples,
                             const CostMatrix& C, double gamma,
                             double eps_prime, const IbpOptions& opts) {
  check_samples(samples, C);
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(eps_prime > 0.0))
    throw std::invalid_argument("eps_prime must be positive");
  for (const Histogram& q : samples)
    if (!q.strictly_positive())
      throw std::invalid_argument("samples must be floored strictly positive");

  const std::size_t n = C.size();
  const std::size_t m = samples.size();
  const double inv_m = 1.0 / static_cast<double>(m);

  ot::SinkhornMode mode = opts.mode;
  if (mode == ot::SinkhornMode::auto_select)
    mode = (C.inf_norm() / gamma > kLogDomainRatio)
               ? ot::SinkhornMode::log_domain
               : ot::SinkhornMode::scaling;

  std::vector<double> logK(n * n), logKT(n * n);
  k::scale(logK.data(), C.data(), -1.0 / gamma, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) logKT[j * n + i] = logK[i * n + j];

  // the scaling path keeps K explicitly; the log path reuses logK rows
  std::vector<double> K, KT;
  if (mode == ot::SinkhornMode::scaling) {
    K.resize(n * n);
    KT.resize(n * n);
    k::vexp(K.data(), logK.data(), n * n);
    k::vexp(KT.data(), logKT.data(), n * n);
  }

  IbpResult result;
  const auto t0 = Clock::now();
  auto record = [&](std::size_t it, const Histogram& p) {
    if (opts.record_every == 0) return;
    if (it % opts.record_every != 0 && it != 0) return;
    sa::RunRecord rec;
    rec.k = it;
    rec.iterate_avg = p;
    rec.obj_estimate = std::numeric_limits<double>::quiet_NaN();
    rec.regret_partial = std::numeric_limits<double>::quiet_NaN();
    if (opts.truth && opts.grid)
      rec.dist_to_truth_w2 =
          measures::w2_distance_1d(p, *opts.truth, *opts.grid);
    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      Clock::now() - t0)
                      .count();
    result.trace.push_back(std::move(rec));
  };

  const double stop_tol = ibp_stop_tol(eps_prime, C);
  std::vector<double> p_prev(n, 1.0 / static_cast<double>(n));
  std::vector<double> p_cur(n);
  record(0, Histogram(std::vector<double>(p_prev)));

  bool converged = false;

  if (mode == ot::SinkhornMode::log_domain) {
    IbpLogState st;
    st.f.assign(m * n, 0.0);
    st.g.assign(m * n, 0.0);
    st.s.assign(m * n, 0.0);
    st.t.assign(m * n, 0.0);
    st.logq.resize(m * n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t r = 0; r < n; ++r)
        st.logq[i * n + r] = std::log(samples[i][r]);

    std::vector<double> logp(n);
    for (std::size_t it = 1; it <= opts.max_outer; ++it) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < n; ++r)
          st.s[i * n + r] =
              k::lse_plus(logK.data() + r * n, st.g.data() + i * n, n);

      // geometric mean of the row marginals, renormalized on the simplex
      std::fill(logp.begin(), logp.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < n; ++r)
          logp[r] += (st.f[i * n + r] + st.s[i * n + r]) * inv_m;
      const double logz = k::lse(logp.data(), n);
      for (std::size_t r = 0; r < n; ++r) logp[r] -= logz;

      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < n; ++r)
          st.f[i * n + r] = logp[r] - st.s[i * n + r];

      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < n; ++c)
          st.t[i * n + c] =
              k::lse_plus(logKT.data() + c * n, st.f.data() + i * n, n);
        for (std::size_t c = 0; c < n; ++c)
          st.g[i * n + c] = st.logq[i * n + c] - st.t[i * n + c];
      }

      k::vexp(p_cur.data(), logp.data(), n);
      result.residual = k::l1_diff(p_cur.data(), p_prev.data(), n);
      result.iterations = it;
      p_prev = p_cur;
      record(it, Histogram::normalized(std::vector<double>(p_cur)));
      if (result.residual <= stop_tol) {
        converged = true;
        break;
      }
    }
  } else {
    std::vector<double> a(m * n, 1.0), b(m * n, 1.0);
    std::vector<double> Kb(m * n), Ka(n), r(n), logp(n);
    for (std::size_t it = 1; it <= opts.max_outer; ++it) {
      std::fill(logp.begin(), logp.end(), 0.0);
      bool underflow = false;
      for (std::size_t i = 0; i < m; ++i) {
        k::matvec(K.data(), n, n, b.data() + i * n, Kb.data() + i * n);
        k::mul(r.data(), a.data() + i * n, Kb.data() + i * n, n);
        for (std::size_t j = 0; j < n; ++j) {
          if (!(r[j] > 0.0) || !std::isfinite(r[j])) {
            underflow = true;
            break;
          }
          logp[j] += std::log(r[j]) * inv_m;
        }
        if (underflow) break;
      }
      if (underflow) {
        if (opts.mode == ot::SinkhornMode::scaling)
          throw NumericUnderflow("IBP scaling underflowed");
        IbpOptions fallback = opts;
        fallback.mode = ot::SinkhornMode::log_domain;
        return run_ibp_barycenter(samples, C, gamma, eps_prime, fallback);
      }
      const double logz = k::lse(logp.data(), n);
      for (std::size_t j = 0; j < n; ++j) logp[j] -= logz;
      k::vexp(p_cur.data(), logp.data(), n);

      for (std::size_t i = 0; i < m; ++i) {
        k::div(a.data() + i * n, p_cur.data(), Kb.data() + i * n, n);
        k::matvec(KT.data(), n, n, a.data() + i * n, Ka.data());
        k::div(b.data() + i * n, samples[i].data(), Ka.data(), n);
      }

      result.residual = k::l1_diff(p_cur.data(), p_prev.data(), n);
      result.iterations = it;
      p_prev = p_cur;
      record(it, Histogram::normalized(std::vector<double>(p_cur)));
      if (result.residual <= stop_tol) {
        converged = true;
        break;
      }
    }
  }

  if (!converged && opts.strict)
    throw NonConvergence("IBP outer budget exhausted", result.iterations,
                         result.residual);

  result.barycenter = Histogram::normalized(std::move(p_prev));
  if (opts.compute_value)
    result.value = empirical_entropic_objective(result.barycenter, samples, C,
                                                gamma, 1e-9);
  return result;
}

SaddleState SaddleState::initial(std::size_t m, std::size_t n) {
  SaddleState st;
  st.m = m;
  st.n = n;
  st.x.assign(m * n * n, 1.0 / static_cast<double>(n * n));
  st.p.assign(n, 1.0 / static_cast<double>(n));
  st.y.assign(m * 2 * n, 0.0);
  return st;
}

void SaddleState::validate() const {
  const std::size_t nn = n * n;
  if (x.size() != m * nn || p.size() != n || y.size() != m * 2 * n)
    throw DimensionMismatch("saddle state block sizes are inconsistent");
  for (std::size_t i = 0; i < m; ++i) {
    const double s = k::sum(x.data() + i * nn, nn);
    if (std::fabs(s - 1.0) > 1e-9)
      throw std::invalid_argument("saddle x block " + std::to_string(i) +
                                  " is off the simplex");
  }
  for (double yi : y)
    if (!(yi >= -1.0 - 1e-12) || !(yi <= 1.0 + 1e-12))
      throw std::invalid_argument("saddle y coordinate outside [-1,1]");
  for (double pi : p)
    if (!(pi >= 0.0))
      throw std::invalid_argument("saddle p has negative entries");
}

SaddleGradient saddle_gradient_operator(const SaddleState& state,
                                        const std::vector<Histogram>& samples,
                                        const CostMatrix& C,
                                        const geometry::BregmanPenalty& pen,
                                        double lambda_op) {
  check_samples(samples, C);
  const std::size_t m = state.m, n = state.n, nn = n * n;
  if (samples.size() != m)
    throw DimensionMismatch("saddle state sample count mismatch");
  detail::require_same_dim(n, C.size(), "saddle state vs cost matrix");
  if (lambda_op < 0.0) throw std::invalid_argument("lambda must be >= 0");

  const double inv_m = 1.0 / static_cast<double>(m);
  const double two_dinf = 2.0 * C.max_entry();  // ||d||_inf of the vectorized cost

  SaddleGradient g;
  g.x.assign(m * nn, 0.0);
  g.p.assign(n, 0.0);
  g.y.assign(m * 2 * n, 0.0);

  // x blocks: (d + 2||d|| A^T y_i) / m, with (A^T y_i)_(r,c) = y_i[r] + y_i[n+c]
  for (std::size_t i = 0; i < m; ++i) {
    const double* yi = state.y.data() + i * 2 * n;
    for (std::size_t r = 0; r < n; ++r)
      k::shift_add(g.x.data() + i * nn + r * n, C.row(r), two_dinf, yi + n,
                   two_dinf * yi[r], n);
  }
  k::scale(g.x.data(), g.x.data(), inv_m, m * nn);

  // p block: (-2||d|| sum_i [y_i]_{1..n} + lambda (grad d(p) - grad d(p1))) / m
  for (std::size_t i = 0; i < m; ++i)
    k::axpy(-two_dinf, state.y.data() + i * 2 * n, g.p.data(), n);
  if (lambda_op > 0.0) {
    const Histogram ph = Histogram::normalized(std::vector<double>(state.p));
    const std::vector<double> gd = pen.prox_grad(ph);
    const std::vector<double> gd1 = pen.prox_grad(pen.reference());
    for (std::size_t r = 0; r < n; ++r) g.p[r] += lambda_op * (gd[r] - gd1[r]);
  }
  k::scale(g.p.data(), g.p.data(), inv_m, n);

  // y blocks: 2||d|| (A x_i - b_i) / m with b_i = (p, q_i)
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = state.x.data() + i * nn;
    double* gy = g.y.data() + i * 2 * n;
    for (std::size_t r = 0; r < n; ++r) gy[r] = k::sum(xi + r * n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) gy[n + c] += xi[r * n + c];
    for (std::size_t r = 0; r < n; ++r) gy[r] -= state.p[r];
    for (std::size_t c = 0; c < n; ++c) gy[n + c] -= samples[i][c];
    k::scale(gy, gy, two_dinf * inv_m, 2 * n);
  }
  return g;
}

namespace {

// entropic prox step on a simplex block, max-shifted
void entropic_prox(double* z, const double* grad, double tau, std::size_t n,
                   std::vector<double>& scratch) {
  scratch.resize(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    scratch[i] = -tau * grad[i];
    if (scratch[i] > mx) mx = scratch[i];
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scratch[i] = z[i] * std::exp(scratch[i] - mx);
    s += scratch[i];
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = scratch[i] / s;
}

void clip_ascent(double* y, const double* grad, double tau, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = std::clamp(y[i] + tau * grad[i], -1.0, 1.0);
}

// Certified lower bound on min_{p in simplex} <c, p> + lambda B_d(p, p1):
// projected subgradient finds a good candidate, then the linearization
// bound at the candidate is returned, so a duality gap built from it never
// understates the true gap.
double min_linear_plus_penalty(const std::vector<double>& c,
                               const geometry::BregmanPenalty& pen,
                               double lambda) {
  const std::size_t n = c.size();
  if (lambda == 0.0) return *std::min_element(c.begin(), c.end());

  const std::vector<double> gd1 = pen.prox_grad(pen.reference());
  Histogram p = pen.reference();
  std::vector<double> step(n), g(n);
  double best_lower = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t <= 400; ++t) {
    const std::vector<double> gd = pen.prox_grad(p);
    for (std::size_t i = 0; i < n; ++i) g[i] = c[i] + lambda * (gd[i] - gd1[i]);
    const double obj =
        k::dot(c.data(), p.data(), n) + lambda * pen.bregman_div(p);
    const double lower = obj + *std::min_element(g.begin(), g.end()) -
                         k::dot(g.data(), p.data(), n);
    best_lower = std::max(best_lower, lower);

    const double eta = std::min(2.0 / (lambda * static_cast<double>(t)), 0.5);
    for (std::size_t i = 0; i < n; ++i) step[i] = p[i] - eta * g[i];
    p = geometry::project_simplex(step);
  }
  return best_lower;
}

}  // namespace

double penalized_duality_gap(const SaddleState& state,
                             const std::vector<Histogram>& samples,
                             const CostMatrix& C,
                             const geometry::BregmanPenalty& pen,
                             double lambda) {
  const std::size_t m = state.m, n = state.n, nn = n * n;
  const double inv_m = 1.0 / static_cast<double>(m);
  const double two_dinf = 2.0 * C.max_entry();

  // max over y at (x, p): the box maximum is the l1 norm of the residuals
  double upper = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = state.x.data() + i * nn;
    upper += k::dot(C.data(), xi, nn);
    for (std::size_t r = 0; r < n; ++r)
      upper += two_dinf * std::fabs(k::sum(xi + r * n, n) - state.p[r]);
    std::vector<double> col(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) k::axpy(1.0, xi + r * n, col.data(), n);
    for (std::size_t c = 0; c < n; ++c)
      upper += two_dinf * std::fabs(col[c] - samples[i][c]);
  }
  upper *= inv_m;
  const Histogram ph = Histogram::normalized(std::vector<double>(state.p));
  upper += lambda * pen.bregman_div(ph);

  // min over (x, p) at y: x blocks pick the smallest reduced entry; the p
  // subproblem is a small strongly convex solve
  double lower = 0.0;
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* yi = state.y.data() + i * 2 * n;
    double blockmin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
      k::shift_add(row.data(), C.row(r), two_dinf, yi + n, two_dinf * yi[r], n);
      blockmin = std::min(blockmin, *std::min_element(row.begin(), row.end()));
    }
    lower += blockmin;
    lower += -two_dinf * k::dot(yi + n, samples[i].data(), n);
  }
  lower *= inv_m;

  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    k::axpy(-two_dinf * inv_m, state.y.data() + i * 2 * n, c.data(), n);
  lower += min_linear_plus_penalty(c, pen, lambda);

  return upper - lower;
}

MirrorProxResult run_mirror_prox(const std::vector<Histogram>& samples,
                                 const CostMatrix& C,
                                 const geometry::BregmanPenalty& pen,
                                 double lambda, double eps_prime,
                                 std::size_t max_iter,
                                 const MirrorProxOptions& opts) {
  check_samples(samples, C);
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(eps_prime > 0.0))
    throw std::invalid_argument("eps_prime must be positive");

  const std::size_t m = samples.size(), n = C.size(), nn = n * n;
  const double lambda_op = lambda * static_cast<double>(m);
  const double two_dinf = 2.0 * C.max_entry();
  const double logn = std::log(static_cast<double>(n));

  // bilinear Lipschitz of the 1/m-scaled operator plus the penalty curvature
  const double L = 2.0 * two_dinf / static_cast<double>(m) +
                   4.0 * lambda * logn + 1e-12;
  const double tau =
      opts.step_override > 0.0 ? opts.step_override : 1.0 / (2.0 * L);

  SaddleState z = SaddleState::initial(m, n);
  SaddleState w = z;
  std::vector<double> scratch;

  // uniform average of the extragradient midpoints
  std::vector<double> ax(m * nn, 0.0), ap(n, 0.0), ay(m * 2 * n, 0.0);
  std::size_t navg = 0;

  MirrorProxResult result;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    SaddleGradient g1 = saddle_gradient_operator(z, samples, C, pen, lambda_op);
    w = z;
    for (std::size_t i = 0; i < m; ++i)
      entropic_prox(w.x.data() + i * nn, g1.x.data() + i * nn, tau, nn, scratch);
    entropic_prox(w.p.data(), g1.p.data(), tau, n, scratch);
    clip_ascent(w.y.data(), g1.y.data(), tau, m * 2 * n);

    SaddleGradient g2 = saddle_gradient_operator(w, samples, C, pen, lambda_op);
    for (std::size_t i = 0; i < m; ++i)
      entropic_prox(z.x.data() + i * nn, g2.x.data() + i * nn, tau, nn, scratch);
    entropic_prox(z.p.data(), g2.p.data(), tau, n, scratch);
    clip_ascent(z.y.data(), g2.y.data(), tau, m * 2 * n);

    k::axpy(1.0, w.x.data(), ax.data(), m * nn);
    k::axpy(1.0, w.p.data(), ap.data(), n);
    k::axpy(1.0, w.y.data(), ay.data(), m * 2 * n);
    ++navg;
    result.iterations = it;

    if (it % opts.gap_every == 0 || it == max_iter) {
      SaddleState avg;
      avg.m = m;
      avg.n = n;
      avg.x.resize(m * nn);
      avg.p.resize(n);
      avg.y.resize(m * 2 * n);
      const double inv = 1.0 / static_cast<double>(navg);
      k::scale(avg.x.data(), ax.data(), inv, m * nn);
      k::scale(avg.p.data(), ap.data(), inv, n);
      k::scale(avg.y.data(), ay.data(), inv, m * 2 * n);
      result.gap = penalized_duality_gap(avg, samples, C, pen, lambda);
      result.gap_history.push_back(result.gap);
      if (result.gap <= eps_prime) {
        result.barycenter = Histogram::normalized(std::move(avg.p));
        return result;
      }
    }
  }

  if (opts.strict)
    throw NonConvergence("mirror prox gap did not reach eps_prime",
                         result.iterations, result.gap);
  std::vector<double> pf(n);
  k::scale(pf.data(), ap.data(), 1.0 / static_cast<double>(navg), n);
  result.barycenter = Histogram::normalized(std::move(pf));
  return result;
}

double penalized_objective(const Histogram& p,
                           const std::vector<Histogram>& samples,
                           const CostMatrix& C,
                           const geometry::BregmanPenalty& pen, double lambda) {
  check_samples(samples, C);
  double acc = 0.0;
  for (const Histogram& q : samples) acc += ot::ot_exact(p, q, C).value;
  return acc / static_cast<double>(samples.size()) +
         lambda * pen.bregman_div(p);
}

double empirical_entropic_objective(const Histogram& p,
                                    const std::vector<Histogram>& samples,
                                    const CostMatrix& C, double gamma,
                                    double tol) {
  check_samples(samples, C);
  ot::SinkhornOptions opts;
  opts.tol = tol;
  double acc = 0.0;
  for (const Histogram& q : samples)
    acc += ot::entropic_ot(p, q, C, gamma, opts).value;
  return acc / static_cast<double>(samples.size());
}

Histogram run_penalized_erm(const std::vector<Histogram>& samples,
                            const CostMatrix& C,
                            const geometry::BregmanPenalty& pen, double lambda,
                            double eps_prime, const PenalizedOptions& opts) {
  check_samples(samples, C);
  if (!(lambda > 0.0))
    throw std::invalid_argument("penalized ERM needs lambda > 0");

  if (opts.method == PenalizedMethod::mirror_prox) {
    MirrorProxOptions mp;
    mp.max_iter = opts.max_iter;
    mp.strict = opts.strict;
    return run_mirror_prox(samples, C, pen, lambda, eps_prime, opts.max_iter,
                           mp)
        .barycenter;
  }

  // test-mode projected subgradient with exact OT subgradients
  const std::size_t n = C.size();
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  Histogram p = Histogram::uniform(n);
  std::vector<double> avg_sum(n, 0.0), grad(n), step(n);
  Histogram best = p;
  double best_obj = std::numeric_limits<double>::infinity();
  const std::vector<double> gd1 = pen.prox_grad(pen.reference());

  for (std::size_t t = 1; t <= opts.max_iter; ++t) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const Histogram& q : samples) {
      const std::vector<double> u = ot::exact_ot_subgradient_p(p, q, C);
      k::axpy(inv_m, u.data(), grad.data(), n);
    }
    const std::vector<double> gd = pen.prox_grad(p);
    for (std::size_t i = 0; i < n; ++i) grad[i] += lambda * (gd[i] - gd1[i]);

    // capped diminishing steps: the strongly-convex 2/(lambda t) envelope,
    // clipped so single steps stay below the cost scale
    const double eta =
        std::min(0.2 / (C.max_entry() * std::sqrt(static_cast<double>(t))),
                 2.0 / (lambda * static_cast<double>(t + 1)));
    for (std::size_t i = 0; i < n; ++i) step[i] = p[i] - eta * grad[i];
    p = geometry::project_simplex(step);

    k::axpy(1.0, p.data(), avg_sum.data(), n);
    std::vector<double> avg(n);
    k::scale(avg.data(), avg_sum.data(), 1.0 / static_cast<double>(t), n);
    const Histogram pa = Histogram::normalized(std::move(avg));
    const double obj_avg = penalized_objective(pa, samples, C, pen, lambda);
    if (opts.objective_history) opts.objective_history->push_back(obj_avg);
    if (obj_avg < best_obj) {
      best_obj = obj_avg;
      best = pa;
    }
    // the last iterate usually outruns the average once steps are small
    const double obj_last = penalized_objective(p, samples, C, pen, lambda);
    if (obj_last < best_obj) {
      best_obj = obj_last;
      best = p;
    }
  }
  return best;
}

}  // namespace wbar::saa
