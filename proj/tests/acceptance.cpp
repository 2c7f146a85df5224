// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails. Each check pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wbar/geometry.hpp"
#include "wbar/io.hpp"
#include "wbar/measures.hpp"
#include "wbar/ot.hpp"
#include "wbar/planner.hpp"
#include "wbar/sa.hpp"
#include "wbar/saa.hpp"

using namespace wbar;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
             .count() /
         1000.0;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- 1
Outcome dual_gradient_correctness() {
  Outcome out;
  std::uint64_t seed = 10001;
  double worst_fd = 0.0, worst_simplex = 0.0;
  for (std::size_t n : {std::size_t(3), std::size_t(5)}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto C = oracles::random_cost(seed, n);
      const auto q = oracles::random_histogram(seed, n);
      std::vector<double> u(n);
      for (double& x : u) x = 2.0 * oracles::next_uniform(seed) - 1.0;
      const double gamma = 0.2 + oracles::next_uniform(seed);

      const auto g = ot::dual_gradient(u, q, C, gamma);
      const auto fd = oracles::central_gradient(
          [&](const std::vector<double>& uu) {
            return ot::dual_value(uu, q, C, gamma);
          },
          u, 1e-5);
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst_fd = std::max(worst_fd, std::fabs(g[i] - fd[i]));
        if (g[i] < 0.0) worst_simplex = 1.0;
        mass += g[i];
      }
      worst_simplex = std::max(worst_simplex, std::fabs(mass - 1.0));
    }
  }
  out.pass = worst_fd <= 1e-6 && worst_simplex <= 1e-12;
  out.detail = "max |grad - fd| = " + fmt(worst_fd) +
               ", max simplex defect = " + fmt(worst_simplex);
  return out;
}

// ---------------------------------------------------------------- 2
Outcome exact_ot_oracle_equivalence() {
  Outcome out;
  std::uint64_t seed = 10002;
  double worst_val = 0.0, worst_gap = 0.0;
  for (std::size_t n : {std::size_t(2), std::size_t(3)}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto p = oracles::random_histogram(seed, n);
      const auto q = oracles::random_histogram(seed, n);
      const auto C = oracles::random_cost(seed, n);
      const auto mine = ot::ot_exact(p, q, C);
      const auto brute = oracles::brute_force_ot(p, q, C);
      worst_val = std::max(worst_val, std::fabs(mine.value - brute.value));
      double pairing = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        pairing += mine.potentials.u[i] * p[i] + mine.potentials.v[i] * q[i];
      worst_gap = std::max(worst_gap, std::fabs(pairing - mine.value) /
                                          std::max(1.0, std::fabs(mine.value)));
    }
  }
  out.pass = worst_val <= 1e-10 && worst_gap <= 1e-8;
  out.detail = "max |value - brute| = " + fmt(worst_val) +
               ", max relative duality gap = " + fmt(worst_gap);
  return out;
}

// ---------------------------------------------------------------- 3
Outcome entropic_sandwich() {
  Outcome out;
  std::uint64_t seed = 10003;
  int checked = 0, holds = 0;
  ot::SinkhornOptions opts;
  opts.tol = 1e-11;
  opts.max_iter = 2000000;
  for (std::size_t n : {std::size_t(3), std::size_t(8)}) {
    for (int rep = 0; rep < 34; ++rep) {
      const auto p = oracles::random_histogram(seed, n, 1e-7);
      const auto q = oracles::random_histogram(seed, n, 1e-7);
      const auto C = oracles::random_cost(seed, n);
      const double w = ot::ot_exact(p, q, C).value;
      for (double gamma : {1.0, 0.1, 0.01}) {
        const double wg = ot::entropic_ot(p, q, C, gamma, opts).value;
        ++checked;
        if (ot::entropic_gap_bound(w, wg, gamma, n)) ++holds;
      }
    }
  }
  out.pass = holds == checked;
  out.detail = std::to_string(holds) + "/" + std::to_string(checked) +
               " triples satisfy W - 2 gamma log n <= W_gamma <= W";
  return out;
}

// ---------------------------------------------------------------- 4
Outcome strong_convexity_midpoint() {
  Outcome out;
  std::uint64_t seed = 10004;
  const std::size_t n = 5;
  ot::SinkhornOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2000000;
  double worst = -1e300;
  for (double gamma : {0.1, 1.0}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto C = oracles::random_cost(seed, n);
      const auto q = oracles::random_histogram(seed, n, 1e-6);
      const auto p1 = oracles::random_histogram(seed, n, 1e-6);
      const auto p2 = oracles::random_histogram(seed, n, 1e-6);
      std::vector<double> mid(n);
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mid[i] = 0.5 * (p1[i] + p2[i]);
        sq += (p1[i] - p2[i]) * (p1[i] - p2[i]);
      }
      const double wm = ot::entropic_ot(Histogram(mid), q, C, gamma, opts).value;
      const double w1 = ot::entropic_ot(p1, q, C, gamma, opts).value;
      const double w2 = ot::entropic_ot(p2, q, C, gamma, opts).value;
      worst = std::max(worst,
                       wm - (0.5 * w1 + 0.5 * w2 - gamma / 8.0 * sq));
    }
  }
  out.pass = worst <= 1e-9;
  out.detail = "max midpoint violation = " + fmt(worst) + " (slack 1e-9)";
  return out;
}

// ---------------------------------------------------------------- 5
Outcome simplex_projection() {
  Outcome out;
  std::uint64_t seed = 10005;
  double worst_oracle = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> w(3);
    for (double& x : w) x = 3.0 * oracles::next_uniform(seed) - 1.0;
    const auto proj = geometry::project_simplex(w);
    const auto oracle = oracles::simplex_grid_minimize(3, [&](const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i) s += (v[i] - w[i]) * (v[i] - w[i]);
      return s;
    });
    for (std::size_t i = 0; i < 3; ++i)
      worst_oracle = std::max(worst_oracle, std::fabs(proj[i] - oracle.argmin[i]));
  }

  double worst_idem = 0.0, worst_nonexp = 0.0;
  const std::size_t n = 50;
  std::vector<double> x(n), y(n);
  for (int rep = 0; rep < 10000; ++rep) {
    for (double& t : x) t = 4.0 * oracles::next_uniform(seed) - 2.0;
    for (double& t : y) t = 4.0 * oracles::next_uniform(seed) - 2.0;
    const auto px = geometry::project_simplex(x);
    const auto py = geometry::project_simplex(y);
    const auto ppx = geometry::project_simplex(px.weights());
    double idem = 0.0, dxy = 0.0, dpq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      idem += std::fabs(px[i] - ppx[i]);
      dxy += (x[i] - y[i]) * (x[i] - y[i]);
      dpq += (px[i] - py[i]) * (px[i] - py[i]);
    }
    worst_idem = std::max(worst_idem, idem);
    worst_nonexp = std::max(worst_nonexp, std::sqrt(dpq) - std::sqrt(dxy));
  }
  out.pass = worst_oracle <= 1e-6 && worst_idem <= 1e-12 &&
             worst_nonexp <= 1e-12;
  out.detail = "oracle gap = " + fmt(worst_oracle) +
               ", idempotence drift = " + fmt(worst_idem) +
               ", expansiveness = " + fmt(worst_nonexp);
  return out;
}

// ---------------------------------------------------------------- 6
namespace synthetic {

class Quadratic : public sa::FirstOrderOracle {
 public:
  double eval(const Histogram& p, const Histogram& q,
              std::vector<double>& grad) override {
    grad.resize(p.size());
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      grad[i] = p[i] - q[i];
      v += 0.5 * grad[i] * grad[i];
    }
    return v;
  }
};

class NoisyLinear : public sa::FirstOrderOracle {
 public:
  double eval(const Histogram& p, const Histogram& q,
              std::vector<double>& grad) override {
    static const double c[3] = {0.0, 0.35, 0.7};
    grad.resize(3);
    double v = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      grad[i] = c[i] + 1.5 * (q[i] - 1.0 / 3.0);  // mean-zero noise
      v += c[i] * p[i];
    }
    return v;
  }
};

}  // namespace synthetic

Outcome sa_rate_shapes() {
  Outcome out;
  const std::vector<std::size_t> budgets = {100, 1000, 10000};
  const int seeds = 16;

  auto fit_slope = [&](const std::vector<double>& subopt) {
    // least squares of log(subopt) against log(N)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      const double lx = std::log(static_cast<double>(budgets[i]));
      const double ly = std::log(subopt[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double k = budgets.size();
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
  };

  // PSGD on the 1-strongly-convex quadratic over the simplex: the
  // population minimizer is the uniform point by symmetry
  std::vector<double> psgd_sub;
  for (std::size_t N : budgets) {
    double acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
      std::uint64_t seed = 777 + 13 * s;
      std::vector<Histogram> data;
      data.reserve(N);
      for (std::size_t i = 0; i < N; ++i)
        data.push_back(oracles::random_histogram(seed, 3));
      synthetic::Quadratic oracle;
      sa::FixedStream stream(std::move(data));
      sa::SaConfig cfg;
      cfg.gamma = 1.0;
      cfg.iterations = N;
      cfg.record_every = N;
      const auto res = sa::run_psgd(oracle, stream, cfg, Histogram::uniform(3));
      double sub = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = res.output[i] - 1.0 / 3.0;
        sub += 0.5 * d * d;
      }
      acc += sub;
    }
    psgd_sub.push_back(acc / seeds);
  }
  const double psgd_slope = fit_slope(psgd_sub);

  // SMD on the noisy linear objective: F* = min_i c_i = 0 at the vertex
  std::vector<double> smd_sub;
  for (std::size_t N : budgets) {
    double acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
      std::uint64_t seed = 991 + 17 * s;
      std::vector<Histogram> data;
      data.reserve(N);
      for (std::size_t i = 0; i < N; ++i)
        data.push_back(oracles::random_histogram(seed, 3));
      synthetic::NoisyLinear oracle;
      sa::FixedStream stream(std::move(data));
      sa::SaConfig cfg;
      cfg.iterations = N;
      cfg.step_rule = sa::StepRule::md_fixed_eta;
      cfg.record_every = N;
      const auto res = sa::run_smd(oracle, stream, cfg, 1.0);
      acc += 0.35 * res.output[1] + 0.7 * res.output[2];
    }
    smd_sub.push_back(acc / seeds);
  }
  const double smd_slope = fit_slope(smd_sub);

  out.pass = psgd_slope <= -0.8 && smd_slope <= -0.4;
  out.detail = "psgd slope = " + fmt(psgd_slope) +
               " (need <= -0.8), smd slope = " + fmt(smd_slope) +
               " (need <= -0.4)";
  return out;
}

// ---------------------------------------------------------------- 7
Outcome gaussian_reproduction() {
  Outcome out;
  measures::GridSpec grid{-5.0, 5.0, 100};
  const double rho = measures::default_rho(grid.n);
  auto raw = measures::squared_distance_cost(grid);
  std::vector<double> ce = raw.entries();
  for (double& x : ce) x /= raw.max_entry();
  const CostMatrix C(grid.n, std::move(ce));

  measures::GaussianFamily fam;
  fam.mean_lo = -1.5;
  fam.mean_hi = 1.5;
  fam.std_lo = 0.8;
  fam.std_hi = 1.2;
  fam.count = 2000;
  fam.seed = 4242;
  const auto truth = measures::true_gaussian_barycenter({0.0}, {1.0}, grid, rho);

  sa::EvalHooks hooks;
  hooks.truth = &truth;
  hooks.grid = &grid;

  // PSGD, scaled budget
  sa::SaConfig psgd_cfg;
  psgd_cfg.gamma = 0.05;
  psgd_cfg.iterations = fam.count;
  psgd_cfg.sinkhorn_tol = 1e-4;
  psgd_cfg.record_every = 100;
  sa::GaussianStream s1(fam, grid, rho);
  const auto psgd = sa::run_psgd_wb(s1, C, psgd_cfg, hooks);
  const double psgd_first = psgd.trace.front().dist_to_truth_w2.value();
  const double psgd_final = psgd.trace.back().dist_to_truth_w2.value();

  // SMD, matched budget
  sa::SaConfig smd_cfg;
  smd_cfg.iterations = fam.count;
  smd_cfg.step_rule = sa::StepRule::md_fixed_eta;
  smd_cfg.record_every = 100;
  sa::GaussianStream s2(fam, grid, rho);
  const auto smd = sa::run_smd_wb(s2, C, smd_cfg, hooks);
  const double smd_first = smd.trace.front().dist_to_truth_w2.value();
  const double smd_final = smd.trace.back().dist_to_truth_w2.value();

  // IBP on the same sample set
  const auto sample = measures::sample_truncated_gaussians(fam, grid, rho);
  saa::IbpOptions iopts;
  iopts.max_outer = 400;
  iopts.strict = false;
  iopts.record_every = 5;
  iopts.truth = &truth;
  iopts.grid = &grid;
  iopts.compute_value = false;
  const auto ibp =
      saa::run_ibp_barycenter(sample.histograms, C, 0.005, 1e-5, iopts);
  const double ibp_first = ibp.trace.front().dist_to_truth_w2.value();
  const double ibp_final = ibp.trace.back().dist_to_truth_w2.value();

  const double r_psgd = psgd_first / psgd_final;
  const double r_smd = smd_first / smd_final;
  const double r_ibp = ibp_first / ibp_final;
  const bool five_fold = r_psgd >= 5.0 && r_smd >= 5.0 && r_ibp >= 5.0;
  const bool ordering = smd_final <= psgd_final;

  out.pass = five_fold && ordering;
  out.detail = "reduction psgd = " + fmt(r_psgd) + "x, smd = " + fmt(r_smd) +
               "x, ibp = " + fmt(r_ibp) + "x (need >= 5x each); smd final " +
               fmt(smd_final) + (ordering ? " <= " : " > ") + "psgd final " +
               fmt(psgd_final);
  return out;
}

// ---------------------------------------------------------------- 8
Outcome saa_contract() {
  Outcome out;
  std::uint64_t seed = 10008;

  // IBP against the projected-gradient oracle at n=3, m=5
  const std::size_t n = 3, m = 5;
  const auto C = oracles::random_cost(seed, n);
  std::vector<Histogram> qs;
  for (std::size_t i = 0; i < m; ++i)
    qs.push_back(oracles::random_histogram(seed, n, 1e-6));
  const double gamma = 0.2, eps_prime = 1e-4;
  const auto ibp = saa::run_ibp_barycenter(qs, C, gamma, eps_prime);

  Histogram p = Histogram::uniform(n);
  double oracle_best =
      saa::empirical_entropic_objective(p, qs, C, gamma, 1e-11);
  for (int t = 1; t <= 3000; ++t) {
    std::vector<double> g(n, 0.0), step(n);
    for (const auto& q : qs) {
      const auto u =
          ot::entropic_ot_subgradient_p(p.floored(1e-9), q, C, gamma, 1e-11);
      for (std::size_t i = 0; i < n; ++i)
        g[i] += u[i] / static_cast<double>(m);
    }
    const double eta = 1.0 / (gamma * t);
    for (std::size_t i = 0; i < n; ++i) step[i] = p[i] - eta * g[i];
    p = geometry::project_simplex(step);
    if (t % 250 == 0)
      oracle_best =
          std::min(oracle_best,
                   saa::empirical_entropic_objective(p, qs, C, gamma, 1e-11));
  }
  const double fidelity = ibp.value - std::min(oracle_best, ibp.value);

  // penalized ERM against the grid oracle at n=3, m=2
  std::vector<Histogram> q2 = {oracles::random_histogram(seed, n, 1e-6),
                               oracles::random_histogram(seed, n, 1e-6)};
  geometry::BregmanPenalty pen(Histogram::uniform(n));
  const double lambda = 0.1 / (2.0 * std::log(3.0));
  const auto grid_oracle = oracles::simplex_grid_minimize(n, [&](const std::vector<double>& praw) {
    std::vector<double> w(praw);
    for (double& x : w) x = std::max(x, 1e-12);
    return saa::penalized_objective(Histogram::normalized(std::move(w)), q2, C,
                                    pen, lambda);
  });
  saa::PenalizedOptions mp;
  mp.max_iter = 400000;
  const auto phat = saa::run_penalized_erm(q2, C, pen, lambda, 2e-4, mp);
  const double pen_gap =
      saa::penalized_objective(phat, q2, C, pen, lambda) - grid_oracle.value;

  out.pass = fidelity <= eps_prime && pen_gap <= 1e-3;
  out.detail = "ibp fidelity gap = " + fmt(fidelity) +
               " (need <= 1e-4), penalized gap = " + fmt(pen_gap) +
               " (need <= 1e-3)";
  return out;
}

// ---------------------------------------------------------------- 9
Outcome planner_exactness() {
  Outcome out;
  std::uint64_t seed = 10009;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    planner::PlannerInput in;
    in.n = 2 + static_cast<std::size_t>(oracles::next_uniform(seed) * 200.0);
    in.eps = 0.01 + oracles::next_uniform(seed);
    in.alpha = 0.01 + 0.4 * oracles::next_uniform(seed);
    in.c_inf = 0.5 + 4.0 * oracles::next_uniform(seed);
    const double logn = std::log(static_cast<double>(in.n));

    const auto unreg = planner::plan_sa_unregularized(in);
    worst = std::max(worst,
                     std::fabs(unreg.sgd.gamma - in.eps / (4.0 * logn)));

    const auto pen = planner::plan_saa_penalized(in);
    const double m_expect =
        32.0 * in.c_inf * in.c_inf * logn / (in.alpha * in.eps * in.eps);
    const double ep_expect =
        in.eps * in.eps * in.eps / (64.0 * in.c_inf * in.c_inf * logn);
    worst = std::max(worst, std::fabs(pen.sample_size - m_expect) /
                                std::max(1.0, m_expect));
    worst = std::max(worst, std::fabs(pen.eps_prime - ep_expect) /
                                std::max(1e-12, ep_expect));
    worst = std::max(worst, std::fabs(pen.lambda - in.eps / (2.0 * logn)));

    const double gamma = 0.05 + oracles::next_uniform(seed);
    const auto sa_plan = planner::plan_sa_entropic(in, gamma);
    worst = std::max(worst, std::fabs(sa_plan.conf_radius_l2 -
                                      std::sqrt(2.0 * in.eps / gamma)));
  }
  out.pass = worst <= 1e-12;
  out.detail = "max formula deviation = " + fmt(worst);
  return out;
}

// ---------------------------------------------------------------- 10
Outcome saddle_operator() {
  Outcome out;
  std::uint64_t seed = 10010;
  const std::size_t n = 2;
  double worst_block = 0.0;

  for (std::size_t m : {std::size_t(1), std::size_t(2)}) {
    const auto C = oracles::random_cost(seed, n);
    std::vector<Histogram> qs;
    for (std::size_t i = 0; i < m; ++i)
      qs.push_back(oracles::random_histogram(seed, n));
    geometry::BregmanPenalty pen(oracles::random_histogram(seed, n, 1e-3));
    const double lambda = 0.6;

    saa::SaddleState st = saa::SaddleState::initial(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      const auto x = oracles::random_histogram(seed, n * n);
      for (std::size_t t = 0; t < n * n; ++t) st.x[i * n * n + t] = x[t];
    }
    const auto pr = oracles::random_histogram(seed, n);
    for (std::size_t t = 0; t < n; ++t) st.p[t] = pr[t];
    for (double& y : st.y) y = 2.0 * oracles::next_uniform(seed) - 1.0;

    const auto g = saa::saddle_gradient_operator(st, qs, C, pen, lambda);

    // dense materialized-A evaluation
    const double dinf = C.max_entry();
    const double inv_m = 1.0 / static_cast<double>(m);
    std::vector<double> A(2 * n * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        A[i * n * n + i * n + j] = 1.0;
        A[(n + j) * n * n + i * n + j] = 1.0;
      }
    const auto gd = pen.prox_grad(
        Histogram::normalized(std::vector<double>(st.p.begin(), st.p.end())));
    const auto gd1 = pen.prox_grad(pen.reference());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t t = 0; t < n * n; ++t) {
        double aty = 0.0;
        for (std::size_t r = 0; r < 2 * n; ++r)
          aty += A[r * n * n + t] * st.y[i * 2 * n + r];
        worst_block = std::max(
            worst_block, std::fabs(g.x[i * n * n + t] -
                                   inv_m * (C.data()[t] + 2.0 * dinf * aty)));
      }
      for (std::size_t r = 0; r < 2 * n; ++r) {
        double ax = 0.0;
        for (std::size_t t = 0; t < n * n; ++t)
          ax += A[r * n * n + t] * st.x[i * n * n + t];
        const double b = r < n ? st.p[r] : qs[i][r - n];
        worst_block =
            std::max(worst_block, std::fabs(g.y[i * 2 * n + r] -
                                            inv_m * 2.0 * dinf * (ax - b)));
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      double sy = 0.0;
      for (std::size_t i = 0; i < m; ++i) sy += st.y[i * 2 * n + t];
      const double expect =
          inv_m * (-2.0 * dinf * sy + lambda * (gd[t] - gd1[t]));
      worst_block = std::max(worst_block, std::fabs(g.p[t] - expect));
    }
  }

  // monotonicity of the induced VI field on random state pairs
  const std::size_t mm = 2, nn = 3;
  const auto C = oracles::random_cost(seed, nn);
  std::vector<Histogram> qs = {oracles::random_histogram(seed, nn),
                               oracles::random_histogram(seed, nn)};
  geometry::BregmanPenalty pen(Histogram::uniform(nn));
  double worst_mono = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    auto rand_state = [&] {
      saa::SaddleState st = saa::SaddleState::initial(mm, nn);
      for (std::size_t i = 0; i < mm; ++i) {
        const auto x = oracles::random_histogram(seed, nn * nn);
        for (std::size_t t = 0; t < nn * nn; ++t) st.x[i * nn * nn + t] = x[t];
      }
      const auto pr = oracles::random_histogram(seed, nn);
      for (std::size_t t = 0; t < nn; ++t) st.p[t] = pr[t];
      for (double& y : st.y) y = 2.0 * oracles::next_uniform(seed) - 1.0;
      return st;
    };
    const auto z1 = rand_state();
    const auto z2 = rand_state();
    const double lambda = rep % 2 == 0 ? 0.0 : 0.5;
    const auto g1 = saa::saddle_gradient_operator(z1, qs, C, pen, lambda);
    const auto g2 = saa::saddle_gradient_operator(z2, qs, C, pen, lambda);
    double inner = 0.0;
    for (std::size_t t = 0; t < g1.x.size(); ++t)
      inner += (g1.x[t] - g2.x[t]) * (z1.x[t] - z2.x[t]);
    for (std::size_t t = 0; t < nn; ++t)
      inner += (g1.p[t] - g2.p[t]) * (z1.p[t] - z2.p[t]);
    for (std::size_t t = 0; t < g1.y.size(); ++t)
      inner -= (g1.y[t] - g2.y[t]) * (z1.y[t] - z2.y[t]);
    worst_mono = std::min(worst_mono, inner);
  }

  out.pass = worst_block <= 1e-12 && worst_mono >= -1e-10;
  out.detail = "max block deviation = " + fmt(worst_block) +
               ", min VI inner product = " + fmt(worst_mono);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"dual-gradient correctness vs finite differences", dual_gradient_correctness},
      {"exact OT equals brute-force vertex enumeration", exact_ot_oracle_equivalence},
      {"entropic sandwich bound", entropic_sandwich},
      {"gamma-strong convexity of W_gamma in p", strong_convexity_midpoint},
      {"simplex projection vs QP oracle + contraction", simplex_projection},
      {"SA suboptimality rate shapes", sa_rate_shapes},
      {"Gaussian reproduction at desk scale", gaussian_reproduction},
      {"SAA empirical-objective contracts", saa_contract},
      {"planner formula exactness", planner_exactness},
      {"saddle operator blocks + monotonicity", saddle_operator},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %zu: %s — %s (%.1fs)\n",
                o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), elapsed_s(t0));
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
