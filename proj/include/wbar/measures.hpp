#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "wbar/types.hpp"

// Random discrete measures on a shared 1-D grid (truncated Gaussians), the
// closed-form true barycenter for evaluation, and W2 metrics.
namespace wbar::measures {

struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t n = 100;

  double point(std::size_t i) const;
  std::vector<double> points() const;
  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  void validate() const;
};

struct GaussianFamily {
  double mean_lo = -2.0, mean_hi = 2.0;
  double std_lo = 0.5, std_hi = 1.5;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

/// mt19937_64-backed uniform generator; bit-reproducible across platforms
/// (std distributions are implementation-defined, so draws are built from
/// raw engine output).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform01();
  double uniform(double lo, double hi);
  std::uint64_t raw();

 private:
  std::mt19937_64 engine_;
};

/// Gaussian density restricted to the grid, renormalized, floored by rho.
Histogram discretize_gaussian(double mean, double stddev, const GridSpec& grid,
                              double rho);

struct SampledMeasures {
  std::vector<Histogram> histograms;
  std::vector<double> means;
  std::vector<double> stds;
};

/// Deterministic for a fixed family seed.
SampledMeasures sample_truncated_gaussians(const GaussianFamily& fam,
                                           const GridSpec& grid, double rho);

/// 1-D W2 barycenter of Gaussians: mean of means, mean of stds, discretized.
Histogram true_gaussian_barycenter(const std::vector<double>& means,
                                   const std::vector<double>& stds,
                                   const GridSpec& grid, double rho = 0.0);

/// W2 distance (square root of the squared-distance OT cost) via the 1-D
/// quantile coupling.
double w2_distance_1d(const Histogram& p, const Histogram& q,
                      const GridSpec& grid);

/// Ground cost C_ij = (x_i - x_j)^2 on the grid.
CostMatrix squared_distance_cost(const GridSpec& grid);

/// Default floor for reproduction runs.
inline double default_rho(std::size_t n) {
  return 1e-6 / static_cast<double>(n);
}

}  // namespace wbar::measures
