#include "wbar/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wbar/kernels.hpp"

namespace wbar::ot {
namespace {

namespace k = wbar::kernels;

constexpr double kLogDomainRatio = 200.0;

// ---------------------------------------------------------------------------
// Dense transport simplex on the bipartite graph rows(0..n-1) / cols(n..2n-1).
// The basis is a spanning tree of 2n-1 arcs; duals are recomputed from the
// tree after every pivot (O(n)), entering arcs are priced row-wise with the
// min_diff kernel.
// ---------------------------------------------------------------------------
class TransportSimplex {
 public:
  TransportSimplex(const Histogram& p, const Histogram& q, const CostMatrix& C)
      : n_(p.size()), p_(p), q_(q), C_(C) {}

  void solve() {
    init_northwest();
    rebuild_tree();

    const double tol_rc = 1e-11 * std::max(1.0, C_.max_entry());
    const std::size_t max_pivots = 200 * n_ * n_ + 1000;
    std::size_t degenerate_streak = 0;
    bool bland = false;

    for (std::size_t pivots = 0;; ++pivots) {
      if (pivots > max_pivots)
        throw InfeasibleNumerics("transport simplex pivot budget exceeded",
                                 last_rc_);
      std::size_t ei, ej;
      if (!price(tol_rc, bland, ei, ej)) break;
      const double theta = pivot(ei, ej);
      rebuild_tree();
      if (theta <= 1e-15) {
        if (++degenerate_streak > 30 * n_) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
    }
  }

  double objective() const {
    double s = 0.0;
    for (const Arc& a : arcs_) s += a.flow * C_(a.row, a.col);
    return s;
  }

  std::vector<double> plan_matrix() const {
    std::vector<double> m(n_ * n_, 0.0);
    for (const Arc& a : arcs_) m[a.row * n_ + a.col] += a.flow;
    return m;
  }

  const std::vector<double>& row_duals() const { return u_; }
  const std::vector<double>& col_duals() const { return v_; }

 private:
  struct Arc {
    std::size_t row, col;
    double flow;
  };

  void init_northwest() {
    std::vector<double> a(p_.weights()), b(q_.weights());
    std::size_t i = 0, j = 0;
    for (;;) {
      const double t = std::min(a[i], b[j]);
      arcs_.push_back({i, j, t});
      a[i] -= t;
      b[j] -= t;
      if (i == n_ - 1 && j == n_ - 1) break;
      if ((a[i] <= b[j] && i < n_ - 1) || j == n_ - 1)
        ++i;
      else
        ++j;
    }
    // staircase construction yields exactly 2n-1 basis arcs
  }

  // BFS from node 0: parents, depths, and tree-exact duals.
  void rebuild_tree() {
    const std::size_t nodes = 2 * n_;
    adj_.assign(nodes, {});
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      adj_[arcs_[a].row].push_back(a);
      adj_[n_ + arcs_[a].col].push_back(a);
    }
    parent_.assign(nodes, -1);
    parent_arc_.assign(nodes, -1);
    depth_.assign(nodes, 0);
    u_.assign(n_, 0.0);
    v_.assign(n_, 0.0);

    stack_.clear();
    stack_.push_back(0);
    std::vector<char> seen(nodes, 0);
    seen[0] = 1;
    while (!stack_.empty()) {
      const std::size_t z = stack_.back();
      stack_.pop_back();
      for (std::size_t a : adj_[z]) {
        const Arc& arc = arcs_[a];
        const std::size_t other = (z < n_) ? n_ + arc.col : arc.row;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_[other] = static_cast<int>(z);
        parent_arc_[other] = static_cast<int>(a);
        depth_[other] = depth_[z] + 1;
        if (z < n_)
          v_[arc.col] = C_(arc.row, arc.col) - u_[z];
        else
          u_[arc.row] = C_(arc.row, arc.col) - v_[z - n_];
        stack_.push_back(other);
      }
    }
  }

  bool price(double tol_rc, bool bland, std::size_t& ei, std::size_t& ej) {
    if (bland) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          if (C_(i, j) - u_[i] - v_[j] < -tol_rc) {
            ei = i;
            ej = j;
            last_rc_ = C_(i, j) - u_[i] - v_[j];
            return true;
          }
      return false;
    }
    double best = -tol_rc;
    bool found = false;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t jmin;
      const double m = k::min_diff(C_.row(i), v_.data(), n_, &jmin) - u_[i];
      if (m < best) {
        best = m;
        ei = i;
        ej = jmin;
        found = true;
      }
    }
    last_rc_ = best;
    return found;
  }

  // Applies the cycle created by entering arc (ei, ej); returns theta.
  double pivot(std::size_t ei, std::size_t ej) {
    // node path from col node back to row node through the tree
    std::size_t a = ei, b = n_ + ej;
    path_a_.clear();
    path_b_.clear();
    while (depth_[a] > depth_[b]) {
      path_a_.push_back(a);
      a = static_cast<std::size_t>(parent_[a]);
    }
    while (depth_[b] > depth_[a]) {
      path_b_.push_back(b);
      b = static_cast<std::size_t>(parent_[b]);
    }
    while (a != b) {
      path_a_.push_back(a);
      path_b_.push_back(b);
      a = static_cast<std::size_t>(parent_[a]);
      b = static_cast<std::size_t>(parent_[b]);
    }
    // full sequence from n_+ej to ei: path_b_, LCA, reversed path_a_
    cycle_nodes_.clear();
    for (std::size_t z : path_b_) cycle_nodes_.push_back(z);
    cycle_nodes_.push_back(a);
    for (std::size_t t = path_a_.size(); t-- > 0;)
      cycle_nodes_.push_back(path_a_[t]);

    // arcs between consecutive nodes alternate -theta, +theta starting at
    // the column end of the entering arc
    cycle_arcs_.clear();
    cycle_sign_.clear();
    for (std::size_t t = 0; t + 1 < cycle_nodes_.size(); ++t) {
      const std::size_t hi = cycle_nodes_[t], lo = cycle_nodes_[t + 1];
      const int arc = (parent_[hi] == static_cast<int>(lo))
                          ? parent_arc_[hi]
                          : parent_arc_[lo];
      cycle_arcs_.push_back(arc);
      cycle_sign_.push_back(t % 2 == 0 ? -1 : +1);
    }

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave_pos = 0;
    for (std::size_t t = 0; t < cycle_arcs_.size(); ++t) {
      if (cycle_sign_[t] < 0 &&
          arcs_[static_cast<std::size_t>(cycle_arcs_[t])].flow <= theta) {
        theta = arcs_[static_cast<std::size_t>(cycle_arcs_[t])].flow;
        leave_pos = t;
      }
    }

    for (std::size_t t = 0; t < cycle_arcs_.size(); ++t) {
      Arc& arc = arcs_[static_cast<std::size_t>(cycle_arcs_[t])];
      arc.flow += cycle_sign_[t] * theta;
      if (arc.flow < 0.0) arc.flow = 0.0;
    }
    arcs_[static_cast<std::size_t>(cycle_arcs_[leave_pos])] = {ei, ej, theta};
    return theta;
  }

  std::size_t n_;
  const Histogram& p_;
  const Histogram& q_;
  const CostMatrix& C_;

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> u_, v_;
  double last_rc_ = 0.0;

  std::vector<std::size_t> stack_, path_a_, path_b_, cycle_nodes_;
  std::vector<int> cycle_arcs_, cycle_sign_;
};

void check_triple(const Histogram& p, const Histogram& q, const CostMatrix& C) {
  detail::require_same_dim(p.size(), q.size(), "marginals");
  detail::require_same_dim(p.size(), C.size(), "marginal vs cost matrix");
}

void check_positive(const Histogram& h, const char* what) {
  if (!h.strictly_positive())
    throw std::invalid_argument(std::string(what) +
                                " must be strictly positive (floor upstream)");
}

// final regularized value from the recovered plan
double primal_value(const CostMatrix& C, const std::vector<double>& plan,
                    double gamma) {
  const std::size_t nn = plan.size();
  return k::dot(C.data(), plan.data(), nn) +
         gamma * k::xlogx_sum(plan.data(), nn);
}

struct ScalingState {
  std::vector<double> log_a, log_b;  // potentials over gamma
  std::size_t iterations = 0;
  double residual = 0.0;
};

ScalingState run_scaling(const Histogram& p, const Histogram& q,
                         const CostMatrix& C, double gamma,
                         const SinkhornOptions& opts) {
  const std::size_t n = p.size();
  std::vector<double> K(n * n);
  k::vexp_scaled(K.data(), C.data(), -1.0 / gamma, 0.0, n * n);

  std::vector<double> a(n, 1.0), b(n, 1.0), Kb(n), Ka(n), rm(n);
  k::matvec(K.data(), n, n, b.data(), Kb.data());

  ScalingState st;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    k::div(a.data(), p.data(), Kb.data(), n);
    k::matvec_t(K.data(), n, n, a.data(), Ka.data());
    k::div(b.data(), q.data(), Ka.data(), n);
    k::matvec(K.data(), n, n, b.data(), Kb.data());

    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (Kb[i] < lo) lo = Kb[i];
      if (Ka[i] < lo) lo = Ka[i];
    }
    if (!(lo > 0.0) || !std::isfinite(k::sum(a.data(), n)))
      throw NumericUnderflow("Sinkhorn kernel scaling underflowed");

    k::mul(rm.data(), a.data(), Kb.data(), n);
    st.residual = k::l1_diff(rm.data(), p.data(), n);
    st.iterations = it;
    if (st.residual <= opts.tol) break;
  }
  if (st.residual > opts.tol)
    throw NonConvergence("Sinkhorn did not reach marginal tolerance",
                         st.iterations, st.residual);

  st.log_a.resize(n);
  st.log_b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.log_a[i] = std::log(a[i]);
    st.log_b[i] = std::log(b[i]);
  }
  return st;
}

ScalingState run_log_domain(const Histogram& p, const Histogram& q,
                            const CostMatrix& C, double gamma,
                            const SinkhornOptions& opts) {
  const std::size_t n = p.size();
  std::vector<double> logK(n * n), logKT(n * n);
  k::scale(logK.data(), C.data(), -1.0 / gamma, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) logKT[j * n + i] = logK[i * n + j];

  std::vector<double> logp(n), logq(n);
  for (std::size_t i = 0; i < n; ++i) {
    logp[i] = std::log(p[i]);
    logq[i] = std::log(q[i]);
  }

  std::vector<double> f(n, 0.0), g(n, 0.0), S(n), T(n), rm(n);
  for (std::size_t i = 0; i < n; ++i)
    S[i] = k::lse_plus(logK.data() + i * n, g.data(), n);

  ScalingState st;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) f[i] = logp[i] - S[i];
    for (std::size_t j = 0; j < n; ++j)
      T[j] = k::lse_plus(logKT.data() + j * n, f.data(), n);
    for (std::size_t j = 0; j < n; ++j) g[j] = logq[j] - T[j];
    for (std::size_t i = 0; i < n; ++i)
      S[i] = k::lse_plus(logK.data() + i * n, g.data(), n);

    for (std::size_t i = 0; i < n; ++i) rm[i] = std::exp(f[i] + S[i]);
    st.residual = k::l1_diff(rm.data(), p.data(), n);
    st.iterations = it;
    if (st.residual <= opts.tol) break;
  }
  if (st.residual > opts.tol)
    throw NonConvergence("log-domain Sinkhorn did not reach marginal tolerance",
                         st.iterations, st.residual);
  st.log_a = std::move(f);
  st.log_b = std::move(g);
  return st;
}

}  // namespace

ExactOtResult ot_exact(const Histogram& p, const Histogram& q,
                       const CostMatrix& C) {
  check_triple(p, q, C);

  TransportSimplex simplex(p, q, C);
  simplex.solve();

  const double value = simplex.objective();
  TransportPlan plan(simplex.plan_matrix(), p, q, 1e-9);
  DualPotentials duals(simplex.row_duals(), simplex.col_duals());
  return ExactOtResult{value, std::move(plan), std::move(duals)};
}

EntropicOtResult entropic_ot(const Histogram& p, const Histogram& q,
                             const CostMatrix& C, double gamma,
                             const SinkhornOptions& opts) {
  check_triple(p, q, C);
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  check_positive(p, "p");
  check_positive(q, "q");

  SinkhornMode mode = opts.mode;
  if (mode == SinkhornMode::auto_select)
    mode = (C.inf_norm() / gamma > kLogDomainRatio) ? SinkhornMode::log_domain
                                                    : SinkhornMode::scaling;

  ScalingState st;
  if (mode == SinkhornMode::scaling) {
    if (opts.mode == SinkhornMode::auto_select) {
      try {
        st = run_scaling(p, q, C, gamma, opts);
      } catch (const NumericUnderflow&) {
        st = run_log_domain(p, q, C, gamma, opts);
      }
    } else {
      st = run_scaling(p, q, C, gamma, opts);
    }
  } else {
    st = run_log_domain(p, q, C, gamma, opts);
  }

  const std::size_t n = p.size();
  std::vector<double> logK(n * n);
  k::scale(logK.data(), C.data(), -1.0 / gamma, n * n);
  std::vector<double> plan(n * n);
  for (std::size_t i = 0; i < n; ++i)
    k::vexp_plus(plan.data() + i * n, logK.data() + i * n, st.log_b.data(),
                 st.log_a[i], n);

  std::vector<double> u(n), v(n);
  k::scale(u.data(), st.log_a.data(), gamma, n);
  k::scale(v.data(), st.log_b.data(), gamma, n);

  EntropicOtResult res{
      primal_value(C, plan, gamma),
      TransportPlan(std::move(plan), p, q, std::max(1e-6, 10.0 * opts.tol)),
      DualPotentials(std::move(u), std::move(v)),
      gamma,
      st.iterations,
      st.residual};
  return res;
}

EntropicOtResult entropic_ot(const Histogram& p, const Histogram& q,
                             const CostMatrix& C, double gamma, double tol,
                             std::size_t max_iter) {
  SinkhornOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return entropic_ot(p, q, C, gamma, opts);
}

double dual_value(const std::vector<double>& u, const Histogram& q,
                  const CostMatrix& C, double gamma) {
  const std::size_t n = q.size();
  detail::require_same_dim(u.size(), n, "dual vector");
  detail::require_same_dim(C.size(), n, "cost matrix");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  std::vector<double> su(n), Cs(n * n);
  k::scale(su.data(), u.data(), 1.0 / gamma, n);
  k::scale(Cs.data(), C.data(), -1.0 / gamma, n * n);

  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    acc += q[j] * k::lse_plus(Cs.data() + j * n, su.data(), n);
  return gamma * (-k::xlogx_sum(q.data(), n) + acc);
}

Histogram dual_gradient(const std::vector<double>& u, const Histogram& q,
                        const CostMatrix& C, double gamma) {
  const std::size_t n = q.size();
  detail::require_same_dim(u.size(), n, "dual vector");
  detail::require_same_dim(C.size(), n, "cost matrix");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  std::vector<double> su(n), Cs(n * n), w(n), out(n, 0.0);
  k::scale(su.data(), u.data(), 1.0 / gamma, n);
  k::scale(Cs.data(), C.data(), -1.0 / gamma, n * n);

  for (std::size_t j = 0; j < n; ++j) {
    if (q[j] == 0.0) continue;
    const double t = k::lse_plus(Cs.data() + j * n, su.data(), n);
    k::vexp_plus(w.data(), Cs.data() + j * n, su.data(), -t, n);
    k::axpy(q[j], w.data(), out.data(), n);
  }
  return Histogram::normalized(std::move(out));
}

std::vector<double> entropic_ot_subgradient_p(const Histogram& p,
                                              const Histogram& q,
                                              const CostMatrix& C, double gamma,
                                              double tol) {
  SinkhornOptions opts;
  opts.tol = tol;
  return entropic_ot(p, q, C, gamma, opts).potentials.u;
}

std::vector<double> exact_ot_subgradient_p(const Histogram& p,
                                           const Histogram& q,
                                           const CostMatrix& C) {
  return ot_exact(p, q, C).potentials.u;
}

bool entropic_gap_bound(double ot_value, double entropic_value, double gamma,
                        std::size_t n) {
  const double slack = 1e-8;
  const double lower = ot_value - 2.0 * gamma * std::log(static_cast<double>(n));
  return entropic_value <= ot_value + slack &&
         lower <= entropic_value + slack;
}

double gradient_bound(const CostMatrix& C, double gamma, double rho) {
  const std::size_t n = C.size();
  const double logn = std::log(static_cast<double>(n));
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double inf_i = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double sup_l = 0.0;
      for (std::size_t l = 0; l < n; ++l)
        sup_l = std::max(sup_l, std::fabs(C(j, l) - C(i, l)));
      inf_i = std::min(inf_i, sup_l);
    }
    const double term = 2.0 * gamma * logn + inf_i - gamma * std::log(rho);
    acc += term * term;
  }
  return std::sqrt(acc);
}

double gradient_bound_rough(const CostMatrix& C) {
  return std::sqrt(static_cast<double>(C.size())) * C.inf_norm();
}

double subgradient_delta_estimate(const CostMatrix& C, double gamma,
                                  double tol) {
  return tol * C.inf_norm() / gamma;
}

}  // namespace wbar::ot
