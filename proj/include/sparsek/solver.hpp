#pragma once

#include <vector>
#include <chrono>
#include <limits>
#include <tuple>
#include <vector>

#include "sparsek/sdp.hpp"

namespace sparsek {

struct SolverConfig {
  double tol_feas = 1e-6;   // target max constraint violation
  double tol_obj = 1e-7;    // relative width of the objective bracket at exit
  long max_iters = 200000;  // total projection rounds across all level queries
  int lazy_rounds = 20;     // cut-generation rounds under the lazy policy
  int halfspace_sweeps = 3; // polyhedral sweeps between PSD projections
  double relaxation = 1.8;  // over-relaxation factor for halfspace steps
};

struct SolveStats {
  long iterations = 0;
  double primal_residual = 0.0;  // max constraint violation at exit
  double dual_residual = 0.0;    // Frobenius displacement of the last round
  double objective_bracket = 0.0;
  long lazy_added = 0;
  int lazy_rounds_used = 0;
  std::vector<long> lazy_violations;  // full-scan violation count per round
  double wall_seconds = 0.0;
  bool converged = false;
};

namespace detail {

struct Triple {
  int x, u, v;
};

// Exact Frobenius projection onto the mass + spreading (+ balanced diagonal)
// affine subspace. The Gram matrix of the constraint normals has closed
// form; dependent rows (mass under balanced) are absorbed by the
// pseudo-inverse.
class EqualityProjector {
 public:
  EqualityProjector(const SdpProblem& prob)
      : n_(prob.n), k_(prob.k), balanced_(prob.balanced), w_(prob.n) {
    for (int u = 0; u < n_; ++u) w_[u] = prob.weights[u];
    const int m = 1 + n_ + (balanced_ ? n_ : 0);
    Matrix gram = Matrix::Zero(m, m);
    const double w2 = w_.squaredNorm();
    gram(0, 0) = w2;
    for (int u = 0; u < n_; ++u) {
      gram(0, 1 + u) = gram(1 + u, 0) = w_[u] * w_[u];
      for (int v = 0; v < n_; ++v) gram(1 + u, 1 + v) = 0.5 * w_[u] * w_[v];
      gram(1 + u, 1 + u) += 0.5 * w2;
    }
    if (balanced_) {
      for (int a = 0; a < n_; ++a) {
        gram(1 + n_ + a, 1 + n_ + a) = 1.0;
        gram(1 + n_ + a, 0) = gram(0, 1 + n_ + a) = w_[a];
        gram(1 + n_ + a, 1 + a) = gram(1 + a, 1 + n_ + a) = w_[a];
      }
    }
    pinv_ = SymPinv(gram);
  }

  Vector residual(const Matrix& m) const {
    Vector r(1 + n_ + (balanced_ ? n_ : 0));
    r[0] = w_.dot(m.diagonal()) - k_;
    const Vector mw = m * w_;
    for (int u = 0; u < n_; ++u) r[1 + u] = mw[u] - 1.0;
    if (balanced_)
      for (int a = 0; a < n_; ++a) r[1 + n_ + a] = m(a, a) - 1.0;
    return r;
  }

  void project(Matrix& m) const {
    const Vector lam = pinv_.solve(residual(m));
    const Vector ls = lam.segment(1, n_);
    m.noalias() -= 0.5 * (ls * w_.transpose() + w_ * ls.transpose());
    m.diagonal() -= lam[0] * w_;
    if (balanced_) m.diagonal() -= lam.segment(1 + n_, n_);
  }

 private:
  int n_;
  int k_;
  bool balanced_;
  Vector w_;
  SymPinv pinv_;
};

// Working state for one problem: objective matrix, equality projector, and
// the materialized triangle list (all triples under eager, grown lazily
// otherwise).
class LevelState {
 public:
  LevelState(const SdpProblem& prob, const SolverConfig& cfg)
      : prob_(prob), cfg_(cfg), eq_(prob), c_(prob.objective_matrix()) {
    c_norm2_ = c_.squaredNorm();
    if (prob.policy == TrianglePolicy::eager) {
      for (int x = 0; x < prob.n; ++x)
        for (int u = 0; u < prob.n; ++u)
          for (int v = u + 1; v < prob.n; ++v)
            if (x != u && x != v) triples_.push_back({x, u, v});
    }
  }

  const Matrix& objective_matrix() const { return c_; }
  double objective(const Matrix& m) const { return prob_.objective(m); }
  const std::vector<Triple>& triples() const { return triples_; }

  void add_triples(const std::vector<Triple>& extra) {
    triples_.insert(triples_.end(), extra.begin(), extra.end());
  }

  // One Gauss-Seidel pass over box, triangle and objective-level halfspaces.
  void halfspace_sweep(Matrix& m, double tau, double relax) const {
    const int n = prob_.n;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        if (m(u, v) < 0.0) {
          const double d = relax * m(u, v);
          m(u, v) -= d;
          m(v, u) -= d;
        }
        if (m(u, v) > m(u, u)) {
          const double step = relax * (m(u, v) - m(u, u)) / 1.5;
          m(u, u) += step;
          m(u, v) -= 0.5 * step;
          m(v, u) -= 0.5 * step;
        }
        if (m(u, v) > m(v, v)) {
          const double step = relax * (m(u, v) - m(v, v)) / 1.5;
          m(v, v) += step;
          m(u, v) -= 0.5 * step;
          m(v, u) -= 0.5 * step;
        }
      }
    for (const Triple& t : triples_) {
      const double val = m(t.x, t.x) - m(t.u, t.x) - m(t.x, t.v) + m(t.u, t.v);
      if (val < 0.0) {
        const double step = relax * (-val) / 2.5;
        m(t.x, t.x) += step;
        m(t.u, t.x) -= 0.5 * step;
        m(t.x, t.u) -= 0.5 * step;
        m(t.x, t.v) -= 0.5 * step;
        m(t.v, t.x) -= 0.5 * step;
        m(t.u, t.v) += 0.5 * step;
        m(t.v, t.u) += 0.5 * step;
      }
    }
    if (std::isfinite(tau) && c_norm2_ > 0.0) {
      const double excess = prob_.objective(m) - tau;
      if (excess > 0.0) m.noalias() -= relax * (excess / c_norm2_) * c_;
    }
  }

  // Max violation over all families except PSD (call on a PSD iterate).
  double residual(const Matrix& m, double tau) const {
    double r = eq_.residual(m).cwiseAbs().maxCoeff();
    const int n = prob_.n;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        r = std::max(r, -m(u, v));
        r = std::max(r, m(u, v) - m(u, u));
        r = std::max(r, m(u, v) - m(v, v));
      }
    for (const Triple& t : triples_)
      r = std::max(r, -(m(t.x, t.x) - m(t.u, t.x) - m(t.x, t.v) + m(t.u, t.v)));
    if (std::isfinite(tau)) r = std::max(r, prob_.objective(m) - tau);
    return r;
  }

  const EqualityProjector& eq() const { return eq_; }

  // Full scan of the (implicit) triangle family; returns triples violated by
  // more than tol that are not yet materialized.
  std::vector<Triple> scan_violations(const Matrix& m, double tol, long* count_all = nullptr) const {
    std::vector<char> have;
    const int n = prob_.n;
    have.assign(static_cast<size_t>(n) * n * n, 0);
    auto id = [n](const Triple& t) {
      return (static_cast<size_t>(t.x) * n + t.u) * n + t.v;
    };
    for (const Triple& t : triples_) have[id(t)] = 1;
    std::vector<Triple> out;
    long violated = 0;
    for (int x = 0; x < n; ++x)
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          if (x == u || x == v) continue;
          const double val = m(x, x) - m(u, x) - m(x, v) + m(u, v);
          if (val < -tol) {
            ++violated;
            Triple t{x, u, v};
            if (!have[id(t)]) out.push_back(t);
          }
        }
    if (count_all) *count_all = violated;
    return out;
  }

 private:
  const SdpProblem& prob_;
  const SolverConfig& cfg_;
  EqualityProjector eq_;
  Matrix c_;
  double c_norm2_ = 0.0;
  std::vector<Triple> triples_;
};

// Cyclic projections at a fixed objective level. Over-relaxed while the
// residual is large, plain projections close in. Returns (iterate, reached
// tolerance, rounds used); bails out early when the residual stalls.
inline std::tuple<Matrix, bool, long> project_to_level(const LevelState& state, Matrix m,
                                                       double tau, double tol, long cap,
                                                       const SolverConfig& cfg,
                                                       double* last_move = nullptr) {
  constexpr int kStallWindow = 400;
  double window_best = std::numeric_limits<double>::infinity();
  double prev_window_best = std::numeric_limits<double>::infinity();
  Matrix prev;
  for (long it = 1; it <= cap; ++it) {
    prev = m;
    for (int s = 0; s < cfg.halfspace_sweeps; ++s) {
      state.eq().project(m);
      state.halfspace_sweep(m, tau, cfg.relaxation);
    }
    state.eq().project(m);
    m = psd_project(m);
    const double res = state.residual(m, tau);
    if (last_move) *last_move = (m - prev).norm();
    if (res <= tol) return {std::move(m), true, it};
    window_best = std::min(window_best, res);
    if (it % kStallWindow == 0) {
      if (window_best > 0.995 * prev_window_best && res > 4.0 * tol)
        return {std::move(m), false, it};
      prev_window_best = window_best;
      window_best = std::numeric_limits<double>::infinity();
    }
  }
  return {std::move(m), false, cap};
}

// Exactly feasible warm start when a positive-weight k-partition exists:
// heaviest-first round-robin assignment embedded as an integral solution.
inline bool striped_warm_start(const SdpProblem& prob, Matrix& m0, double& obj) {
  const int n = prob.n;
  std::vector<int> order(n);
  for (int u = 0; u < n; ++u) order[u] = u;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return prob.weights[a] > prob.weights[b]; });
  int positive = 0;
  for (int u = 0; u < n; ++u)
    if (prob.weights[u] > 0.0) ++positive;
  if (positive < prob.k) return false;

  std::vector<std::vector<int>> blocks(prob.k);
  for (int i = 0; i < n; ++i) blocks[i % prob.k].push_back(order[i]);
  m0 = Matrix::Zero(n, n);
  for (const auto& blk : blocks) {
    double wb = 0.0;
    for (int u : blk) wb += prob.weights[u];
    for (int u : blk)
      for (int v : blk) m0(u, v) = 1.0 / wb;
  }
  obj = prob.objective(m0);
  return true;
}

}  // namespace detail

// Desk-scale SDP solve: bisection on the objective level over alternating
// projections (equality subspace, box/triangle halfspaces, PSD cone), with
// lazy triangle-cut rounds when requested. Deterministic; no randomness.
inline std::pair<GramSolution, SolveStats> solve(const SdpProblem& prob,
                                                 const SolverConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (prob.n <= 0 || prob.k < 2 || prob.k > prob.n) throw BadProblem("malformed SDP problem");
  if (!(cfg.tol_feas > 0.0) || !(cfg.tol_obj > 0.0) || cfg.max_iters < 1)
    throw BadProblem("invalid solver configuration");

  SolveStats stats;
  detail::LevelState state(prob, cfg);
  const double tol_inner = 0.6 * cfg.tol_feas;
  const long warm_cap = std::max<long>(1500, cfg.max_iters / 80);
  const long full_cap = std::max<long>(2000, cfg.max_iters / 6);
  const double inf = std::numeric_limits<double>::infinity();

  Matrix best;
  double best_obj = 0.0;
  double warm_obj = 0.0;
  double last_move = 0.0;
  bool have_feasible = false;

  if (detail::striped_warm_start(prob, best, warm_obj)) {
    best_obj = warm_obj;
    have_feasible = true;
    if (prob.balanced && state.residual(best, inf) > tol_inner) have_feasible = false;
  }
  if (!have_feasible || best.size() == 0) {
    if (best.size() == 0) {
      best = Matrix::Zero(prob.n, prob.n);
      double tw = 0.0;
      for (double w : prob.weights) tw += w;
      for (int u = 0; u < prob.n; ++u) best(u, u) = prob.k / tw;
    }
    auto [m, ok, used] = detail::project_to_level(state, best, inf, tol_inner,
                                                  full_cap * 2, cfg, &last_move);
    stats.iterations += used;
    best = std::move(m);
    best_obj = state.objective(best);
    have_feasible = ok;
  }
  // Queries far from the optimum succeed quickly from the current best
  // iterate. Near the optimum, a warm start on the optimal face crawls along
  // the boundary and stalls, so failed queries are retried from this neutral
  // point before the level is declared unreachable.
  const Matrix neutral = best;

  const int max_rounds = prob.policy == TrianglePolicy::lazy ? cfg.lazy_rounds : 1;
  bool lazy_clean = prob.policy == TrianglePolicy::eager;
  for (int round = 0; round < max_rounds; ++round) {
    stats.lazy_rounds_used = round + 1;
    // Under the lazy policy each cut round gets at most half of what is
    // left, so late rounds can still re-solve after new cuts arrive.
    const long remaining = cfg.max_iters - stats.iterations;
    const long round_end =
        prob.policy == TrianglePolicy::lazy
            ? stats.iterations + std::min(remaining, std::max(cfg.max_iters / 8, remaining / 2))
            : cfg.max_iters;
    double tau_lo = 0.0;
    double tau_hi = best_obj;
    while (stats.iterations < round_end) {
      const double gap_tol = std::max(cfg.tol_obj * std::max(1.0, std::abs(tau_hi)), 1e-9);
      if (tau_hi - tau_lo <= gap_tol) break;
      const double tau = 0.5 * (tau_lo + tau_hi);
      auto [m, ok, used] =
          detail::project_to_level(state, best, tau, tol_inner,
                                   std::min<long>(warm_cap, round_end - stats.iterations), cfg,
                                   &last_move);
      stats.iterations += used;
      if (!ok && stats.iterations < round_end) {
        auto retry = detail::project_to_level(
            state, neutral, tau, tol_inner,
            std::min<long>(full_cap, round_end - stats.iterations), cfg, &last_move);
        stats.iterations += std::get<2>(retry);
        if (std::get<1>(retry)) {
          m = std::move(std::get<0>(retry));
          ok = true;
        }
      }
      if (ok) {
        best = std::move(m);
        best_obj = state.objective(best);
        tau_hi = std::min(tau, best_obj);
        have_feasible = true;
      } else {
        tau_lo = tau;
      }
    }
    stats.objective_bracket = tau_hi - tau_lo;

    if (prob.policy == TrianglePolicy::lazy) {
      long violated = 0;
      auto extra = state.scan_violations(best, cfg.tol_feas, &violated);
      stats.lazy_violations.push_back(violated);
      if (violated == 0) {
        lazy_clean = true;
        break;
      }
      lazy_clean = false;
      state.add_triples(extra);
      stats.lazy_added += static_cast<long>(extra.size());
      // re-establish feasibility against the enlarged system before the
      // next level search
      auto [m, ok, used] = detail::project_to_level(
          state, best, inf, tol_inner,
          std::min<long>(full_cap, std::max<long>(1, cfg.max_iters - stats.iterations)), cfg,
          &last_move);
      stats.iterations += used;
      if (ok) {
        best = std::move(m);
        best_obj = state.objective(best);
      }
      if (stats.iterations >= cfg.max_iters) break;
    }
  }

  // Final PSD repair: clip, then rescale so the mass constraint holds exactly.
  best = psd_project(best);
  double mass = 0.0;
  for (int u = 0; u < prob.n; ++u) mass += prob.weights[u] * best(u, u);
  if (mass > 0.0) best *= prob.k / mass;

  GramSolution sol;
  sol.m = std::move(best);
  sol.objective_value = prob.objective(sol.m);
  FeasibilityReport rep = check_feasibility(prob, sol);
  sol.max_violation = rep.max_violation();

  stats.primal_residual = sol.max_violation;
  stats.dual_residual = last_move;
  stats.converged = have_feasible && sol.max_violation <= cfg.tol_feas && lazy_clean;
  stats.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return {std::move(sol), stats};
}

// Explicit vectors from a PSD Gram matrix: row u of the result is the vector
// for vertex u; eigenvalues below rank_tol are dropped.
inline Matrix gram_factor(const GramSolution& sol, double rank_tol = 1e-10) {
  SymEigen e = sym_eigen(sol.m);
  if (e.values[0] < -1e-6) throw NotPsd("Gram matrix has eigenvalue below -1e-6");
  int kept = 0;
  for (int j = 0; j < e.values.size(); ++j)
    if (e.values[j] > rank_tol) ++kept;
  Matrix vectors(sol.n(), std::max(kept, 1));
  vectors.setZero();
  int c = 0;
  for (int j = 0; j < e.values.size(); ++j) {
    if (e.values[j] > rank_tol) {
      vectors.col(c) = std::sqrt(e.values[j]) * e.vectors.col(j);
      ++c;
    }
  }
  return vectors;
}

}  // namespace sparsek
