#include "wbar/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbar::measures {

double GridSpec::point(std::size_t i) const {
  return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(n - 1);
}

std::vector<double> GridSpec::points() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = point(i);
  return x;
}

void GridSpec::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("grid needs lo < hi");
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::raw() { return engine_(); }

double Rng::uniform01() {
  // top 53 bits -> [0, 1); the engine is fully specified by the standard,
  // unlike std::uniform_real_distribution
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

Histogram discretize_gaussian(double mean, double stddev, const GridSpec& grid,
                              double rho) {
  grid.validate();
  if (!(stddev > 0.0)) throw std::invalid_argument("stddev must be positive");
  std::vector<double> w(grid.n);
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double z = (grid.point(i) - mean) / stddev;
    w[i] = std::exp(-0.5 * z * z);
    mass += w[i];
  }
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw DegenerateMass("Gaussian density underflowed on the whole grid");
  Histogram h = Histogram::normalized(std::move(w));
  return rho > 0.0 ? h.floored(rho) : h;
}

SampledMeasures sample_truncated_gaussians(const GaussianFamily& fam,
                                           const GridSpec& grid, double rho) {
  grid.validate();
  if (!(fam.std_lo > 0.0) || !(fam.std_hi >= fam.std_lo))
    throw std::invalid_argument("std range must be strictly positive");
  if (!(fam.mean_hi >= fam.mean_lo))
    throw std::invalid_argument("mean range is inverted");
  if (fam.count == 0) throw std::invalid_argument("family count must be >= 1");

  Rng rng(fam.seed);
  SampledMeasures out;
  out.histograms.reserve(fam.count);
  out.means.reserve(fam.count);
  out.stds.reserve(fam.count);
  for (std::size_t i = 0; i < fam.count; ++i) {
    const double mean = rng.uniform(fam.mean_lo, fam.mean_hi);
    const double stddev = rng.uniform(fam.std_lo, fam.std_hi);
    out.histograms.push_back(discretize_gaussian(mean, stddev, grid, rho));
    out.means.push_back(mean);
    out.stds.push_back(stddev);
  }
  return out;
}

Histogram true_gaussian_barycenter(const std::vector<double>& means,
                                   const std::vector<double>& stds,
                                   const GridSpec& grid, double rho) {
  if (means.empty() || means.size() != stds.size())
    throw std::invalid_argument("need equally many means and stds");
  double mean = 0.0, stddev = 0.0;
  for (double m : means) mean += m;
  for (double s : stds) stddev += s;
  mean /= static_cast<double>(means.size());
  stddev /= static_cast<double>(stds.size());
  return discretize_gaussian(mean, stddev, grid, rho);
}

double w2_distance_1d(const Histogram& p, const Histogram& q,
                      const GridSpec& grid) {
  detail::require_same_dim(p.size(), q.size(), "w2 operands");
  detail::require_same_dim(p.size(), grid.n, "histogram vs grid");

  // quantile (CDF-inverse) coupling over merged prefix masses
  std::size_t i = 0, j = 0;
  double cp = p[0], cq = q[0], used = 0.0, acc = 0.0;
  while (true) {
    const double take = std::min(cp, cq) - used;
    if (take > 0.0) {
      const double d = grid.point(i) - grid.point(j);
      acc += take * d * d;
      used += take;
    }
    if (cp <= cq) {
      if (++i >= p.size()) break;
      cp += p[i];
    } else {
      if (++j >= q.size()) break;
      cq += q[j];
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

CostMatrix squared_distance_cost(const GridSpec& grid) {
  grid.validate();
  std::vector<double> c(grid.n * grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double d = grid.point(i) - grid.point(j);
      c[i * grid.n + j] = d * d;
    }
  return CostMatrix(grid.n, std::move(c));
}

}  // namespace wbar::measures
