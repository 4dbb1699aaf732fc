#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "sparsek/graph.hpp"
#include "sparsek/linalg.hpp"

namespace sparsek {

// Stirling partition numbers S(n,k) by the standard recurrence; used to
// cross-check enumeration completeness.
inline unsigned long long stirling_second(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n == 0) return 1;
  std::vector<std::vector<unsigned long long>> s(n + 1, std::vector<unsigned long long>(k + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, k); ++j)
      s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  return s[n][k];
}

// Enumerate all partitions of {0..n-1} into exactly k non-empty blocks via
// restricted growth strings; calls fn(assignment) for each.
inline unsigned long long enumerate_partitions(
    int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  unsigned long long count = 0;
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (n - i < k - used) return;  // not enough vertices left to open the remaining blocks
    if (i == n) {
      if (used == k) {
        ++count;
        fn(a);
      }
      return;
    }
    const int limit = std::min(used, k - 1);
    for (int b = 0; b <= limit; ++b) {
      a[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
  return count;
}

struct BruteForceResult {
  Partition partition;
  double value = 0.0;
  unsigned long long enumerated = 0;
};

// Exact sparsest k-partition by exhaustive enumeration (n <= 12).
inline BruteForceResult brute_force_opt(const Graph& g, int k) {
  const int n = g.n();
  if (k < 1 || k > n) throw BadK("brute_force_opt: k out of range");
  if (n > 12) throw TooLarge("brute_force_opt handles n <= 12");

  BruteForceResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> block_w(k), block_cut(k);
  best.enumerated = enumerate_partitions(n, k, [&](const std::vector<int>& a) {
    std::fill(block_w.begin(), block_w.end(), 0.0);
    std::fill(block_cut.begin(), block_cut.end(), 0.0);
    for (int u = 0; u < n; ++u) block_w[a[u]] += g.vertex_weight(u);
    for (const Edge& e : g.edges())
      if (a[e.u] != a[e.v]) {
        block_cut[a[e.u]] += e.weight;
        block_cut[a[e.v]] += e.weight;
      }
    double worst = 0.0;
    for (int b = 0; b < k; ++b) {
      if (!(block_w[b] > 0.0)) return;  // zero-weight block: expansion undefined
      worst = std::max(worst, block_cut[b] / block_w[b]);
    }
    if (worst < best.value) {
      best.value = worst;
      best.partition.blocks.assign(k, VertexSet(n));
      for (int u = 0; u < n; ++u) best.partition.blocks[a[u]].add(u);
    }
  });
  if (!std::isfinite(best.value))
    throw ZeroWeight("no k-partition with all blocks of positive weight");
  return best;
}

struct SparsestCutResult {
  VertexSet cut_side;
  double value = 0.0;
};

// Exact sparsest cut: min over non-empty S with w(S) <= w(V)/2 of
// cut(S)/w(S).  Uses the min-side convention from the problem statement.
inline SparsestCutResult brute_force_sparsest_cut(const Graph& g) {
  const int n = g.n();
  if (n > 24) throw TooLarge("brute_force_sparsest_cut handles n <= 24");
  const double half = g.total_vertex_weight() / 2.0;
  SparsestCutResult best;
  best.value = std::numeric_limits<double>::infinity();
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 1; mask + 1 < limit; ++mask) {
    double w = 0.0;
    for (int u = 0; u < n; ++u)
      if (mask & (1u << u)) w += g.vertex_weight(u);
    if (!(w > 0.0) || w > half + 1e-12) continue;
    double cut = 0.0;
    for (const Edge& e : g.edges())
      if (((mask >> e.u) & 1u) != ((mask >> e.v) & 1u)) cut += e.weight;
    const double val = cut / w;
    if (val < best.value) {
      best.value = val;
      best.cut_side = VertexSet(n);
      for (int u = 0; u < n; ++u)
        if (mask & (1u << u)) best.cut_side.add(u);
    }
  }
  if (!std::isfinite(best.value)) throw ZeroWeight("no admissible cut side");
  return best;
}

struct SpectrumReport {
  Vector eigenvalues;  // ascending
  int k = 0;
  double lambda_k = 0.0;
};

// Full spectrum of the normalized Laplacian I - D^{-1/2} A D^{-1/2} with
// weighted degrees; requires no isolated vertices.
inline SpectrumReport spectrum(const Graph& g, int k) {
  const int n = g.n();
  if (k < 1 || k > n) throw BadK("spectrum: k out of range");
  Vector deg(n);
  for (int u = 0; u < n; ++u) {
    deg[u] = g.weighted_degree(u);
    if (!(deg[u] > 0.0)) throw IsolatedVertex("spectrum needs minimum degree > 0");
  }
  Matrix lap = Matrix::Identity(n, n);
  for (const Edge& e : g.edges()) {
    const double x = e.weight / std::sqrt(deg[e.u] * deg[e.v]);
    lap(e.u, e.v) -= x;
    lap(e.v, e.u) -= x;
  }
  SpectrumReport rep;
  rep.eigenvalues = sym_eigen(lap).values;
  rep.k = k;
  rep.lambda_k = rep.eigenvalues[k - 1];
  return rep;
}

// Exact rational value with small integer terms; sufficient for the
// assignment-SDP verification where every quantity is a multiple of 1/k.
struct Fraction {
  long long num = 0;
  long long den = 1;

  static Fraction of(long long n, long long d) {
    Fraction f{n, d};
    f.reduce();
    return f;
  }
  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  bool is(long long n, long long d) const {
    Fraction o = of(n, d);
    return num == o.num && den == o.den;
  }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

struct GapInstance {
  Graph graph;
  int n = 0;
  int k = 0;
  struct Check {
    std::string name;
    std::string value;  // exact rational
    bool ok = false;
  };
  std::vector<Check> transcript;
  bool feasible = false;
  Fraction alpha;  // objective of the closed-form solution
  double brute_force_value = 0.0;
};

// Two disjoint cliques with the closed-form assignment-SDP solution
// u_i = sqrt(2/k) e_i: feasible with alpha = 0, while the true k-sparsity is
// bounded away from zero. Verification is exact: every product of two
// solution entries is 0 or 2/k, so all constraint values are rationals.
inline GapInstance assignment_gap_demo(int n, int k) {
  if (n < 4) throw BadParams("gap demo needs n >= 4");
  if (k <= 2 || k % 2 != 0) throw BadParams("gap demo needs even k > 2");
  const int half = k / 2;
  const int n1 = n / 2;
  std::vector<Edge> edges;
  for (int u = 0; u < n1; ++u)
    for (int v = u + 1; v < n1; ++v) edges.push_back({u, v, 1.0});
  for (int u = n1; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0});

  GapInstance out{Graph(n, edges)};
  out.n = n;
  out.k = k;

  // Basis index of u_i (in units of sqrt(2/k)), or -1 for the zero vector.
  auto basis = [&](int u, int i) {
    if (u < n1) return i < half ? i : -1;
    return i >= half ? i - half : -1;
  };
  auto inner = [&](int u, int i, int v, int j) {  // <u_i, v_j>, exact
    const int a = basis(u, i), b = basis(v, j);
    return (a >= 0 && a == b) ? Fraction::of(2, k) : Fraction::of(0, 1);
  };

  bool all_ok = true;
  auto record = [&](const std::string& name, const Fraction& value, bool ok) {
    out.transcript.push_back({name, value.str(), ok});
    all_ok = all_ok && ok;
  };

  // Objective rows: sum over edges of |u_i - v_i|^2 must vanish (alpha = 0).
  for (int i = 0; i < k; ++i) {
    long long units = 0;  // edge contributions in units of 2/k
    for (const Edge& e : out.graph.edges()) {
      const int a = basis(e.u, i), b = basis(e.v, i);
      if (a == b) continue;
      units += (a >= 0 && b >= 0) ? 2 : 1;
    }
    record("edge term i=" + std::to_string(i), Fraction::of(2 * units, k), units == 0);
  }
  // Per-vertex: sum_i |u_i|^2 = 1 and pairwise orthogonality.
  for (int u = 0; u < n; ++u) {
    long long nonzero = 0;
    for (int i = 0; i < k; ++i)
      if (basis(u, i) >= 0) ++nonzero;
    Fraction total = Fraction::of(2 * nonzero, k);
    record("unit mass u=" + std::to_string(u), total, total.is(1, 1));
  }
  bool ortho = true;
  for (int u = 0; u < n && ortho; ++u)
    for (int i = 0; i < k && ortho; ++i)
      for (int j = i + 1; j < k; ++j)
        if (!inner(u, i, u, j).is(0, 1)) {
          ortho = false;
          break;
        }
  record("pairwise orthogonality", Fraction::of(0, 1), ortho);
  // <sum_i u_i, I> = 1 per vertex, and |I|^2 = 1; I = sqrt(2/k) sum of the
  // first k/2 basis vectors.
  bool align_ok = true;
  for (int u = 0; u < n; ++u) {
    long long overlap = 0;  // basis hits of sum_i u_i against I
    for (int i = 0; i < k; ++i) {
      const int b = basis(u, i);
      if (b >= 0 && b < half) ++overlap;
    }
    if (!Fraction::of(2 * overlap, k).is(1, 1)) align_ok = false;
  }
  record("alignment with I", Fraction::of(1, 1), align_ok);
  record("norm of I", Fraction::of(2 * half, k), Fraction::of(2 * half, k).is(1, 1));

  out.feasible = all_ok;
  out.alpha = Fraction::of(0, 1);
  if (n <= 12) out.brute_force_value = brute_force_opt(out.graph, k).value;
  return out;
}

}  // namespace sparsek
