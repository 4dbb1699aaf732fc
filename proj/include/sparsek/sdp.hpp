#pragma once

#include <cmath>
#include <vector>

#include "sparsek/graph.hpp"
#include "sparsek/linalg.hpp"

namespace sparsek {

enum class TrianglePolicy { eager, lazy };

// Gram-matrix form of the sparsest k-partition SDP:
//
//   min (1/k) sum_{(u,v) in E} w_e (M_uu + M_vv - 2 M_uv)
//   s.t.  sum_u w_u M_uu = k                      (mass)
//         sum_v w_v M_uv = 1        for all u     (spreading)
//         M_xx - M_ux - M_xv + M_uv >= 0          (triangle, all x and pairs u<v)
//         M_uv >= 0, M_uv <= M_uu, M_uv <= M_vv   (box)
//         M PSD
//
// The balanced variant additionally fixes M_uu = 1 and rescales vertex
// weights so that w(V) = k.
struct SdpProblem {
  int n = 0;
  int k = 0;
  bool balanced = false;
  TrianglePolicy policy = TrianglePolicy::eager;
  std::vector<double> weights;  // rescaled when balanced
  double weight_scale = 1.0;    // weights = original * weight_scale
  std::vector<Edge> edges;

  double objective(const Matrix& m) const {
    double obj = 0.0;
    for (const Edge& e : edges) obj += e.weight * (m(e.u, e.u) + m(e.v, e.v) - 2.0 * m(e.u, e.v));
    return obj / k;
  }

  // Objective coefficient matrix C (weighted Laplacian / k).
  Matrix objective_matrix() const {
    Matrix c = Matrix::Zero(n, n);
    for (const Edge& e : edges) {
      c(e.u, e.u) += e.weight / k;
      c(e.v, e.v) += e.weight / k;
      c(e.u, e.v) -= e.weight / k;
      c(e.v, e.u) -= e.weight / k;
    }
    return c;
  }

  long long triangle_count() const {
    return static_cast<long long>(n) * (static_cast<long long>(n) * (n - 1) / 2);
  }
  long long box_upper_count() const { return static_cast<long long>(n) * (n - 1); }
  long long box_lower_count() const { return static_cast<long long>(n) * (n - 1) / 2; }
  int equality_count() const { return 1 + n + (balanced ? n : 0); }
};

// PSD Gram matrix of inner products plus the value and worst residual it was
// certified with.
struct GramSolution {
  Matrix m;
  double objective_value = 0.0;
  double max_violation = 0.0;

  int n() const { return static_cast<int>(m.rows()); }
  Vector norms_sq() const { return m.diagonal(); }
};

// nu with the squared norms read off a Gram diagonal.
inline double nu(const Graph& g, const VertexSet& s, const GramSolution& sdp) {
  if (sdp.n() != g.n()) throw DimensionMismatch("nu: solution dimension does not match graph");
  const Vector norms = sdp.norms_sq();
  return nu(g, s, std::span<const double>(norms.data(), norms.size()));
}

inline SdpProblem build_sdp(const Graph& g, int k, bool balanced = false,
                            TrianglePolicy policy = TrianglePolicy::eager) {
  if (k < 2 || k > g.n()) throw BadK("k must satisfy 2 <= k <= n");
  SdpProblem p;
  p.n = g.n();
  p.k = k;
  p.balanced = balanced;
  p.policy = policy;
  p.edges = g.edges();
  p.weights = g.vertex_weights();
  if (balanced) {
    p.weight_scale = k / g.total_vertex_weight();
    for (double& w : p.weights) w *= p.weight_scale;
  }
  return p;
}

// Gram matrix of the integral solution for a full k-partition:
// M_uv = 1/w(P_i) when u,v share block P_i, else 0. Exactly feasible, with
// objective (1/k) sum_i phi(P_i).
inline GramSolution embed_partition(const Graph& g, const Partition& p, bool balanced = false) {
  validate_partition(g, p, /*require_full=*/true);
  const double scale = balanced ? p.blocks.size() / g.total_vertex_weight() : 1.0;
  GramSolution sol;
  sol.m = Matrix::Zero(g.n(), g.n());
  for (const VertexSet& b : p.blocks) {
    double wb = 0.0;
    for (int u : b.members()) wb += g.vertex_weight(u) * scale;
    if (!(wb > 0.0)) throw NotAPartition("block with zero weight");
    for (int u : b.members())
      for (int v : b.members()) sol.m(u, v) = 1.0 / wb;
  }
  SdpProblem prob = build_sdp(g, static_cast<int>(p.blocks.size()), balanced);
  sol.objective_value = prob.objective(sol.m);
  sol.max_violation = 0.0;
  return sol;
}

// Residuals of a candidate solution against each constraint family.
struct FeasibilityReport {
  double mass = 0.0;        // |sum w_u M_uu - k|
  double spreading = 0.0;   // max_u |sum_v w_v M_uv - 1|
  double triangle = 0.0;    // max violation over all n*C(n,2) triples
  double box_lower = 0.0;   // max(0, -M_uv)
  double box_upper = 0.0;   // max(0, M_uv - M_uu) over ordered pairs
  double balanced = 0.0;    // max_u |M_uu - 1| (balanced problems only)
  double psd = 0.0;         // max(0, -lambda_min)

  double max_violation() const {
    double m = mass;
    for (double r : {spreading, triangle, box_lower, box_upper, balanced, psd})
      m = std::max(m, r);
    return m;
  }
  bool passes(double tol) const { return max_violation() <= tol; }
};

inline FeasibilityReport check_feasibility(const SdpProblem& prob, const GramSolution& sol) {
  const int n = prob.n;
  if (sol.n() != n) throw DimensionMismatch("solution dimension does not match problem");
  const Matrix& m = sol.m;
  FeasibilityReport r;

  double mass = 0.0;
  for (int u = 0; u < n; ++u) mass += prob.weights[u] * m(u, u);
  r.mass = std::abs(mass - prob.k);

  for (int u = 0; u < n; ++u) {
    double s = 0.0;
    for (int v = 0; v < n; ++v) s += prob.weights[v] * m(u, v);
    r.spreading = std::max(r.spreading, std::abs(s - 1.0));
  }

  for (int x = 0; x < n; ++x)
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        if (x == u || x == v) continue;
        const double val = m(x, x) - m(u, x) - m(x, v) + m(u, v);
        r.triangle = std::max(r.triangle, -val);
      }
  r.triangle = std::max(r.triangle, 0.0);

  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      r.box_lower = std::max(r.box_lower, -m(u, v));
      r.box_upper = std::max(r.box_upper, m(u, v) - m(u, u));
    }
  r.box_lower = std::max(r.box_lower, 0.0);
  r.box_upper = std::max(r.box_upper, 0.0);

  if (prob.balanced)
    for (int u = 0; u < n; ++u) r.balanced = std::max(r.balanced, std::abs(m(u, u) - 1.0));

  SymEigen e = sym_eigen(m);
  r.psd = std::max(0.0, -e.values[0]);
  return r;
}

}  // namespace sparsek
