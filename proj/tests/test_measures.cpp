#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wbar/measures.hpp"
#include "wbar/ot.hpp"

using wbar::Histogram;
namespace ms = wbar::measures;

TEST_CASE("grid spec points and validation") {
  ms::GridSpec g{-1.0, 1.0, 5};
  CHECK(g.point(0) == doctest::Approx(-1.0));
  CHECK(g.point(4) == doctest::Approx(1.0));
  CHECK(g.step() == doctest::Approx(0.5));
  CHECK_THROWS(ms::GridSpec{1.0, -1.0, 5}.validate());
  CHECK_THROWS(ms::GridSpec{0.0, 1.0, 1}.validate());
}

TEST_CASE("sampling is deterministic per seed") {
  ms::GridSpec grid{-5.0, 5.0, 30};
  ms::GaussianFamily fam;
  fam.count = 5;
  fam.seed = 1234;
  const auto a = ms::sample_truncated_gaussians(fam, grid, 1e-8);
  const auto b = ms::sample_truncated_gaussians(fam, grid, 1e-8);
  REQUIRE(a.histograms.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 30; ++j)
      CHECK(a.histograms[i][j] == b.histograms[i][j]);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.means[i] >= fam.mean_lo);
    CHECK(a.means[i] <= fam.mean_hi);
    CHECK(a.stds[i] >= fam.std_lo);
    CHECK(a.stds[i] <= fam.std_hi);
  }
}

TEST_CASE("very wide gaussian is nearly uniform on the grid") {
  ms::GridSpec grid{-5.0, 5.0, 40};
  const auto h = ms::discretize_gaussian(0.0, 10.0, grid, 0.0);
  CHECK(h.min_weight() > 0.0);
  double mx = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) mx = std::max(mx, h[i]);
  CHECK(mx / h.min_weight() < 2.0);
}

TEST_CASE("narrow gaussian mean lands within one grid cell") {
  ms::GridSpec grid{-5.0, 5.0, 100};
  const double mean = 1.37, stddev = 0.8;
  const auto h = ms::discretize_gaussian(mean, stddev, grid, 0.0);
  double m1 = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) m1 += h[i] * grid.point(i);
  CHECK(std::fabs(m1 - mean) <= grid.step());
}

TEST_CASE("degenerate density raises") {
  ms::GridSpec grid{-5.0, 5.0, 10};
  CHECK_THROWS_AS(ms::discretize_gaussian(1e6, 1e-3, grid, 0.0),
                  wbar::DegenerateMass);
}

TEST_CASE("true barycenter closed form cases") {
  ms::GridSpec grid{-5.0, 5.0, 60};
  // fixed point: identical parameters
  const auto one = ms::discretize_gaussian(0.5, 1.2, grid, 0.0);
  const auto fix = ms::true_gaussian_barycenter({0.5, 0.5}, {1.2, 1.2}, grid);
  for (std::size_t i = 0; i < 60; ++i)
    CHECK(fix[i] == doctest::Approx(one[i]).epsilon(1e-12));

  // single measure
  const auto single = ms::true_gaussian_barycenter({0.5}, {1.2}, grid);
  for (std::size_t i = 0; i < 60; ++i)
    CHECK(single[i] == doctest::Approx(one[i]).epsilon(1e-12));

  // means {0,2}, stds {1,1} -> N(1,1); check against the quantile-average
  // construction of the barycenter (equal stds: quantile mean is exact)
  const auto bar = ms::true_gaussian_barycenter({0.0, 2.0}, {1.0, 1.0}, grid);
  const auto direct = ms::discretize_gaussian(1.0, 1.0, grid, 0.0);
  for (std::size_t i = 0; i < 60; ++i)
    CHECK(bar[i] == doctest::Approx(direct[i]).epsilon(1e-12));

  // quantile-average oracle: mixture-of-two-quantiles distribution binned on
  // the grid should be W2-close to the closed form (within a grid cell)
  const auto qa = [&] {
    std::vector<double> w(grid.n, 0.0);
    const int T = 20000;
    for (int t = 0; t < T; ++t) {
      const double u = (t + 0.5) / T;
      // shared standard normal quantile via bisection on erf
      double lo = -10.0, hi = 10.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * (1.0 + std::erf(mid / std::sqrt(2.0))) < u ? lo : hi) = mid;
      }
      const double z = 0.5 * (lo + hi);
      const double x = 0.5 * ((0.0 + 1.0 * z) + (2.0 + 1.0 * z));
      const double pos = (x - grid.lo) / grid.step();
      const long idx = std::lround(pos);
      if (idx >= 0 && idx < static_cast<long>(grid.n))
        w[static_cast<std::size_t>(idx)] += 1.0;
    }
    return Histogram::normalized(std::move(w));
  }();
  CHECK(ms::w2_distance_1d(bar, qa, grid) <= grid.step());
}

TEST_CASE("w2 basics: identity and two diracs") {
  ms::GridSpec grid{0.0, 3.0, 4};
  const auto p = Histogram::point_mass(4, 0);
  const auto q = Histogram::point_mass(4, 3);
  CHECK(ms::w2_distance_1d(p, p, grid) == doctest::Approx(0.0));
  CHECK(ms::w2_distance_1d(p, q, grid) == doctest::Approx(3.0));
}

TEST_CASE("w2 agrees with the exact LP on the squared-distance cost") {
  ms::GridSpec grid{-2.0, 2.0, 16};
  const auto C = ms::squared_distance_cost(grid);
  std::uint64_t seed = 1717;
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = oracles::random_histogram(seed, 16);
    const auto q = oracles::random_histogram(seed, 16);
    const double lp = std::sqrt(wbar::ot::ot_exact(p, q, C).value);
    CHECK(ms::w2_distance_1d(p, q, grid) == doctest::Approx(lp).epsilon(1e-8));
  }
}

TEST_CASE("w2 is a metric on sampled triples") {
  ms::GridSpec grid{-3.0, 3.0, 12};
  std::uint64_t seed = 999;
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = oracles::random_histogram(seed, 12);
    const auto q = oracles::random_histogram(seed, 12);
    const auto r = oracles::random_histogram(seed, 12);
    const double pq = ms::w2_distance_1d(p, q, grid);
    const double qp = ms::w2_distance_1d(q, p, grid);
    CHECK(pq == doctest::Approx(qp).epsilon(1e-10));
    CHECK(ms::w2_distance_1d(p, p, grid) <= 1e-10);
    CHECK(pq <= ms::w2_distance_1d(p, r, grid) +
                    ms::w2_distance_1d(r, q, grid) + 1e-8);
  }
}

TEST_CASE("true barycenter nearly minimizes the empirical Frechet functional") {
  ms::GridSpec grid{-5.0, 5.0, 8};
  const std::vector<double> means = {-0.8, 1.1}, stds = {0.9, 1.3};
  std::vector<Histogram> qs;
  for (std::size_t i = 0; i < 2; ++i)
    qs.push_back(ms::discretize_gaussian(means[i], stds[i], grid, 1e-8));
  const auto frechet = [&](const Histogram& p) {
    double acc = 0.0;
    for (const auto& q : qs) {
      const double d = ms::w2_distance_1d(p, q, grid);
      acc += 0.5 * d * d;
    }
    return acc;
  };
  const auto bar = ms::true_gaussian_barycenter(means, stds, grid, 1e-8);
  const double f_bar = frechet(bar);

  // random candidates plus perturbations of the closed form; discretization
  // allows a small edge, bounded by the grid resolution
  std::uint64_t seed = 31415;
  double f_best = 1e300;
  for (int rep = 0; rep < 4000; ++rep) {
    const auto cand = oracles::random_histogram(seed, 8);
    f_best = std::min(f_best, frechet(cand));
  }
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<double> w(8);
    for (std::size_t i = 0; i < 8; ++i)
      w[i] = bar[i] * (0.75 + 0.5 * oracles::next_uniform(seed));
    f_best = std::min(f_best, frechet(Histogram::normalized(std::move(w))));
  }
  CHECK(f_bar <= f_best + 0.5 * grid.step() * grid.step());
}
