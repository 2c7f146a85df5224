#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wbar/geometry.hpp"
#include "wbar/measures.hpp"
#include "wbar/ot.hpp"
#include "wbar/sa.hpp"
#include "wbar/types.hpp"

// Sample Average Approximation solvers: Iterative Bregman Projections for
// the entropic empirical barycenter, Bregman-penalized empirical risk
// minimization, and the mirror-prox saddle solver behind it.
namespace wbar::saa {

/// Harness-facing parameter bundle. Exactly one of {gamma > 0 (IBP path),
/// lambda > 0 (penalized path)} drives a run.
struct SaaConfig {
  std::size_t m = 1;
  double gamma = 0.0;
  double lambda = 0.0;
  double eps_prime = 1e-6;
  std::size_t max_outer = 20000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IbpOptions {
  std::size_t max_outer = 20000;
  bool strict = true;  // throw NonConvergence when the budget runs out
  std::size_t record_every = 0;  // 0 = no trace
  const Histogram* truth = nullptr;
  const measures::GridSpec* grid = nullptr;
  ot::SinkhornMode mode = ot::SinkhornMode::auto_select;
  bool compute_value = true;  // final (1/m) sum W_gamma(p_hat, q_i)
};

struct IbpResult {
  Histogram barycenter;
  double value = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;  // final l1 movement of the barycenter iterate
  std::vector<sa::RunRecord> trace;
};

/// Iterative Bregman projections for min_p (1/m) sum_i W_gamma(p, q_i).
/// Stops when the barycenter iterate moves less than a tolerance derived
/// from eps_prime (see stop rule in the implementation) or the budget ends.
IbpResult run_ibp_barycenter(const std::vector<Histogram>& samples,
                             const CostMatrix& C, double gamma,
                             double eps_prime, const IbpOptions& opts = {});

/// Saddle state for the penalized reformulation: m vectorized plans on
/// Delta_{n^2}, the barycenter p, and m dual blocks in [-1,1]^{2n}.
struct SaddleState {
  std::size_t m = 0, n = 0;
  std::vector<double> x;  // m * n^2, block i holds plan i row-major
  std::vector<double> p;  // n
  std::vector<double> y;  // m * 2n, block i = (row duals, col duals)

  /// Uniform plans, p at the prox-center (uniform), y = 0.
  static SaddleState initial(std::size_t m, std::size_t n);
  void validate() const;
};

struct SaddleGradient {
  std::vector<double> x;  // m * n^2
  std::vector<double> p;  // n
  std::vector<double> y;  // m * 2n
};

/// Gradient operator of the penalized saddle objective, every block scaled
/// by 1/m, with the implicit incidence matrix applied as row/column sums.
/// Callers targeting penalty weight lambda on the averaged objective pass
/// lambda * m here (the 1/m scaling covers the penalty block too).
SaddleGradient saddle_gradient_operator(const SaddleState& state,
                                        const std::vector<Histogram>& samples,
                                        const CostMatrix& C,
                                        const geometry::BregmanPenalty& pen,
                                        double lambda_op);

struct MirrorProxOptions {
  std::size_t max_iter = 200000;
  std::size_t gap_every = 50;
  bool strict = true;
  double step_override = 0.0;  // 0 = use 1/(2L)
};

struct MirrorProxResult {
  Histogram barycenter;
  double gap = 0.0;
  std::size_t iterations = 0;
  std::vector<double> gap_history;  // one entry per gap evaluation
};

/// Extragradient iterations with entropic prox on the simplex blocks and
/// coordinatewise clipping on y; stops when the duality-gap estimate of the
/// averaged iterate drops below eps_prime.
MirrorProxResult run_mirror_prox(const std::vector<Histogram>& samples,
                                 const CostMatrix& C,
                                 const geometry::BregmanPenalty& pen,
                                 double lambda, double eps_prime,
                                 std::size_t max_iter,
                                 const MirrorProxOptions& opts = {});

/// Duality gap of a candidate (x, p, y) for the lambda-penalized saddle
/// objective; the p-subproblem of the min side is solved internally.
double penalized_duality_gap(const SaddleState& state,
                             const std::vector<Histogram>& samples,
                             const CostMatrix& C,
                             const geometry::BregmanPenalty& pen,
                             double lambda);

enum class PenalizedMethod { mirror_prox, subgradient };

struct PenalizedOptions {
  PenalizedMethod method = PenalizedMethod::mirror_prox;
  std::size_t max_iter = 200000;
  bool strict = true;
  /// subgradient test mode: objective of the averaged iterate per step
  std::vector<double>* objective_history = nullptr;
};

/// min_p (1/m) sum_i W(p, q_i) + lambda B_d(p, p1) to precision eps_prime.
Histogram run_penalized_erm(const std::vector<Histogram>& samples,
                            const CostMatrix& C,
                            const geometry::BregmanPenalty& pen, double lambda,
                            double eps_prime, const PenalizedOptions& opts = {});

/// (1/m) sum_i W(p, q_i) + lambda B_d(p, p1), exact-OT evaluation.
double penalized_objective(const Histogram& p,
                           const std::vector<Histogram>& samples,
                           const CostMatrix& C,
                           const geometry::BregmanPenalty& pen, double lambda);

/// (1/m) sum_i W_gamma(p, q_i) by Sinkhorn at tolerance tol.
double empirical_entropic_objective(const Histogram& p,
                                    const std::vector<Histogram>& samples,
                                    const CostMatrix& C, double gamma,
                                    double tol);

}  // namespace wbar::saa
