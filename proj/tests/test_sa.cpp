#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wbar/geometry.hpp"
#include "wbar/measures.hpp"
#include "wbar/sa.hpp"

using wbar::CostMatrix;
using wbar::Histogram;
namespace sa = wbar::sa;
namespace ms = wbar::measures;

namespace {

// f(p, xi) = 0.5 ||p - xi||^2: 1-strongly convex with gradient p - xi
class QuadraticOracle : public sa::FirstOrderOracle {
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

// fails once per (deterministic) call counter, then recovers
class FlakyOracle : public sa::FirstOrderOracle {
 public:
  double eval(const Histogram& p, const Histogram& q,
              std::vector<double>& grad) override {
    if (++calls_ % 3 == 0)
      throw wbar::NonConvergence("synthetic failure", 1, 1.0);
    QuadraticOracle quad;
    return quad.eval(p, q, grad);
  }
  double eval_precise(const Histogram& p, const Histogram& q,
                      std::vector<double>& grad) override {
    QuadraticOracle quad;
    return quad.eval(p, q, grad);
  }
  bool has_retry() const override { return true; }

 private:
  int calls_ = 0;
};

std::vector<Histogram> random_stream_data(std::uint64_t seed, std::size_t n,
                                          std::size_t count) {
  std::vector<Histogram> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(oracles::random_histogram(seed, n));
  return out;
}

}  // namespace

TEST_CASE("psgd approaches the single-measure entropic optimum") {
  std::uint64_t seed = 11;
  const auto C = oracles::random_cost(seed, 3);
  const auto q = oracles::random_histogram(seed, 3, 1e-6);
  const double gamma = 0.1;

  sa::FixedStream stream(std::vector<Histogram>(4000, q));
  sa::SaConfig cfg;
  cfg.gamma = gamma;
  cfg.iterations = 4000;
  cfg.sinkhorn_tol = 1e-9;
  cfg.record_every = 1000;
  const auto res = sa::run_psgd_wb(stream, C, cfg);

  wbar::ot::SinkhornOptions tight;
  tight.tol = 1e-11;
  const auto oracle = oracles::simplex_grid_minimize(3, [&](const std::vector<double>& praw) {
    std::vector<double> w(praw);
    for (double& x : w) x = std::max(x, 1e-9);
    return wbar::ot::entropic_ot(Histogram::normalized(std::move(w)), q, C,
                                 gamma, tight)
        .value;
  });
  const double at_avg =
      wbar::ot::entropic_ot(res.output.floored(1e-9), q, C, gamma, tight).value;
  CHECK(at_avg - oracle.value <= 1e-2);
}

TEST_CASE("psgd N=1 is one hand-computed projected step") {
  std::uint64_t seed = 21;
  const auto C = oracles::random_cost(seed, 3);
  const auto q = oracles::random_histogram(seed, 3, 1e-6);
  const double gamma = 0.5;

  sa::FixedStream stream({q});
  sa::SaConfig cfg;
  cfg.gamma = gamma;
  cfg.iterations = 1;
  cfg.sinkhorn_tol = 1e-10;
  const auto res = sa::run_psgd_wb(stream, C, cfg);

  const auto u =
      wbar::ot::entropic_ot_subgradient_p(Histogram::uniform(3), q, C, gamma,
                                          1e-10);
  std::vector<double> step(3);
  for (std::size_t i = 0; i < 3; ++i)
    step[i] = 1.0 / 3.0 - (1.0 / gamma) * u[i];  // eta_1 = 1/gamma
  const auto expect = wbar::geometry::project_simplex(step);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(res.output[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("recorded averages always live on the simplex") {
  std::uint64_t seed = 31;
  const auto C = oracles::random_cost(seed, 4);
  sa::FixedStream stream(random_stream_data(seed, 4, 50));
  sa::SaConfig cfg;
  cfg.gamma = 0.3;
  cfg.iterations = 50;
  cfg.sinkhorn_tol = 1e-7;
  cfg.record_every = 7;
  const auto res = sa::run_psgd_wb(stream, C, cfg);
  for (const auto& rec : res.trace) {
    if (rec.iterate_avg.size() == 0) continue;
    double mass = 0.0;
    for (std::size_t i = 0; i < rec.iterate_avg.size(); ++i) {
      CHECK(rec.iterate_avg[i] >= 0.0);
      mass += rec.iterate_avg[i];
    }
    CHECK(std::fabs(mass - 1.0) <= 1e-9);
  }
  CHECK(res.round_values.size() == 50);
}

TEST_CASE("smd stays put on a zero-gradient stream") {
  const std::size_t n = 4;
  const CostMatrix C(n, std::vector<double>(n * n, 0.0));
  std::uint64_t seed = 41;
  sa::FixedStream stream(random_stream_data(seed, n, 30));
  sa::SaConfig cfg;
  cfg.iterations = 30;
  cfg.step_rule = sa::StepRule::md_fixed_eta;
  const auto res = sa::run_smd_wb(stream, C, cfg);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(res.output[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("smd iterates stay strictly positive and the step matches Alg 4") {
  std::uint64_t seed = 43;
  const auto C = oracles::random_cost(seed, 5);
  sa::FixedStream stream(random_stream_data(seed, 5, 64));
  sa::SaConfig cfg;
  cfg.iterations = 64;
  cfg.step_rule = sa::StepRule::md_fixed_eta;
  cfg.record_every = 1;
  const auto res = sa::run_smd_wb(stream, C, cfg);
  CHECK(res.eta_used ==
        doctest::Approx(std::sqrt(2.0 * std::log(5.0)) /
                        (C.max_entry() * std::sqrt(64.0)))
            .epsilon(1e-15));
  CHECK(res.output.min_weight() > 0.0);

  sa::SaConfig ov = cfg;
  ov.eta_override = 0.123;
  sa::FixedStream stream2(random_stream_data(seed, 5, 64));
  CHECK(sa::run_smd_wb(stream2, C, ov).eta_used == 0.123);
}

TEST_CASE("tail averaging averages exactly the last half of the iterates") {
  std::uint64_t seed = 97;
  const std::size_t N = 12, n = 3;
  const auto data = random_stream_data(seed, n, N);

  QuadraticOracle oracle;
  sa::SaConfig cfg;
  cfg.gamma = 1.0;
  cfg.iterations = N;
  cfg.record_every = 1;

  sa::FixedStream full_stream(data);
  const auto full = sa::run_psgd(oracle, full_stream, cfg, Histogram::uniform(n));

  // reconstruct the post-update iterates from the running averages
  std::vector<std::vector<double>> iterates;
  for (std::size_t t = 1; t < full.trace.size(); ++t) {
    const auto& prev = full.trace[t - 1].iterate_avg;
    const auto& cur = full.trace[t].iterate_avg;
    std::vector<double> it(n);
    for (std::size_t i = 0; i < n; ++i)
      it[i] = static_cast<double>(t) * cur[i] -
              static_cast<double>(t - 1) * prev[i];
    iterates.push_back(std::move(it));
  }
  REQUIRE(iterates.size() == N);

  sa::SaConfig tail_cfg = cfg;
  tail_cfg.tail_average = true;
  sa::FixedStream tail_stream(data);
  const auto tail =
      sa::run_psgd(oracle, tail_stream, tail_cfg, Histogram::uniform(n));

  std::vector<double> expect(n, 0.0);
  std::size_t cnt = 0;
  for (std::size_t t = N / 2; t < N; ++t) {  // rounds N/2+1 .. N
    for (std::size_t i = 0; i < n; ++i) expect[i] += iterates[t][i];
    ++cnt;
  }
  for (double& x : expect) x /= static_cast<double>(cnt);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(tail.output[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("stream exhaustion is reported") {
  std::uint64_t seed = 47;
  const auto C = oracles::random_cost(seed, 3);
  sa::FixedStream stream(random_stream_data(seed, 3, 5));
  sa::SaConfig cfg;
  cfg.gamma = 0.5;
  cfg.iterations = 10;
  CHECK_THROWS_AS(sa::run_psgd_wb(stream, C, cfg), wbar::StreamExhausted);
}

TEST_CASE("oracle failures are retried once through the precise path") {
  std::uint64_t seed = 53;
  FlakyOracle oracle;
  sa::FixedStream stream(random_stream_data(seed, 3, 30));
  sa::SaConfig cfg;
  cfg.gamma = 1.0;
  cfg.iterations = 30;
  const auto res = sa::run_psgd(oracle, stream, cfg, Histogram::uniform(3));
  CHECK(res.oracle_retries == 10);  // every third call failed once
  CHECK(res.round_values.size() == 30);
}

TEST_CASE("regret on the synthetic strongly convex oracle") {
  std::uint64_t seed = 61;
  const Histogram reference = Histogram::uniform(3);  // E[xi] by symmetry

  for (std::size_t N : {std::size_t(100), std::size_t(1000), std::size_t(10000)}) {
    QuadraticOracle oracle;
    sa::FixedStream stream(random_stream_data(seed, 3, N));
    sa::SaConfig cfg;
    cfg.gamma = 1.0;  // strong convexity modulus of the quadratic
    cfg.iterations = N;
    cfg.record_every = N;
    sa::EvalHooks hooks;
    hooks.regret_reference = &reference;
    const auto res = sa::run_psgd(oracle, stream, cfg, Histogram::uniform(3), hooks);
    const double reg = sa::empirical_regret(res);
    const double cap = 1.0 + std::log(static_cast<double>(N));
    // (M^2 + delta^2)/gamma * (1 + log N) with M <= sqrt(2): constant ~2
    CHECK(reg / cap <= 4.0);
  }
}

TEST_CASE("regret is nonnegative against a per-round-optimal reference") {
  std::uint64_t seed = 67;
  const auto q = oracles::random_histogram(seed, 3);
  QuadraticOracle oracle;
  sa::FixedStream stream(std::vector<Histogram>(40, q));
  sa::SaConfig cfg;
  cfg.gamma = 1.0;
  cfg.iterations = 40;
  sa::EvalHooks hooks;
  hooks.regret_reference = &q;  // minimizes every round exactly
  const auto res = sa::run_psgd(oracle, stream, cfg, Histogram::uniform(3), hooks);
  CHECK(sa::empirical_regret(res) >= -1e-12);

  // N=1 regret is a single term
  sa::FixedStream one(std::vector<Histogram>(1, q));
  sa::SaConfig c1 = cfg;
  c1.iterations = 1;
  const auto r1 = sa::run_psgd(oracle, one, c1, Histogram::uniform(3), hooks);
  CHECK(r1.round_values.size() == 1);
  CHECK(sa::empirical_regret(r1) ==
        doctest::Approx(r1.round_values[0] - r1.reference_values[0]));
}

TEST_CASE("regret without a reference raises MissingReference") {
  sa::RunResult res;
  res.round_values = {1.0, 2.0};
  CHECK_THROWS_AS(sa::empirical_regret(res), wbar::MissingReference);
  CHECK_THROWS_AS(sa::empirical_regret({1.0, 2.0}, {0.5}),
                  wbar::MissingReference);
}

TEST_CASE("gaussian reproduction run, desk scale") {
  // m = 200 on the n = 100 grid: both solvers reduce the W2 distance of
  // the averaged iterate, and mirror descent ends at least as close as
  // projected SGD on the matched budget
  ms::GridSpec grid{-5.0, 5.0, 100};
  const double rho = ms::default_rho(grid.n);
  auto raw = ms::squared_distance_cost(grid);
  std::vector<double> ce = raw.entries();
  for (double& x : ce) x /= raw.max_entry();
  const CostMatrix C(grid.n, std::move(ce));

  ms::GaussianFamily fam;
  fam.mean_lo = -1.5;
  fam.mean_hi = 1.5;
  fam.std_lo = 0.8;
  fam.std_hi = 1.2;
  fam.count = 200;
  fam.seed = 2024;
  const auto truth = ms::true_gaussian_barycenter({0.0}, {1.0}, grid, rho);

  sa::EvalHooks hooks;
  hooks.truth = &truth;
  hooks.grid = &grid;

  sa::SaConfig psgd_cfg;
  psgd_cfg.gamma = 0.05;
  psgd_cfg.iterations = fam.count;
  psgd_cfg.sinkhorn_tol = 1e-4;
  psgd_cfg.record_every = 50;
  sa::GaussianStream s1(fam, grid, rho);
  const auto psgd = sa::run_psgd_wb(s1, C, psgd_cfg, hooks);

  sa::SaConfig smd_cfg;
  smd_cfg.iterations = fam.count;
  smd_cfg.step_rule = sa::StepRule::md_fixed_eta;
  smd_cfg.record_every = 50;
  sa::GaussianStream s2(fam, grid, rho);
  const auto smd = sa::run_smd_wb(s2, C, smd_cfg, hooks);

  const double psgd_first = psgd.trace.front().dist_to_truth_w2.value();
  const double psgd_final = psgd.trace.back().dist_to_truth_w2.value();
  const double smd_first = smd.trace.front().dist_to_truth_w2.value();
  const double smd_final = smd.trace.back().dist_to_truth_w2.value();

  CHECK(psgd_final < psgd_first);
  CHECK(smd_final < 0.75 * smd_first);
  CHECK(smd_final <= psgd_final);

  // SMD's averaged trace decreases monotonically after the burn-in
  for (std::size_t t = 2; t < smd.trace.size(); ++t)
    CHECK(smd.trace[t].dist_to_truth_w2.value() <=
          smd.trace[t - 1].dist_to_truth_w2.value() + 1e-9);
}
