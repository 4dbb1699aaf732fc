#pragma once

#include <algorithm>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sparsek/common.hpp"

namespace sparsek {

struct Edge {
  int u;
  int v;
  double weight;
};

// Undirected graph with nonnegative vertex weights and positive edge weights.
// At most one stored edge per unordered pair; duplicate edges passed to the
// constructor are folded by summing weights. When no vertex weights are
// given, w_u is set to the weighted degree (degree mode).
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges) : Graph(n, std::move(edges), {}, true) {}

  Graph(int n, std::vector<Edge> edges, std::vector<double> vertex_weights)
      : Graph(n, std::move(edges), std::move(vertex_weights), false) {}

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& vertex_weights() const { return w_; }
  double vertex_weight(int u) const { return w_[u]; }
  double total_vertex_weight() const { return total_w_; }
  double total_edge_weight() const { return total_edge_w_; }
  bool degree_mode() const { return degree_mode_; }
  double weighted_degree(int u) const { return degree_[u]; }

 private:
  Graph(int n, std::vector<Edge> edges, std::vector<double> vertex_weights, bool degree_mode)
      : n_(n), degree_mode_(degree_mode) {
    if (n <= 0) throw Error("graph needs at least one vertex");
    std::map<std::pair<int, int>, double> folded;
    for (const Edge& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) throw Error("edge endpoint out of range");
      if (e.u == e.v) throw Error("self-loops are not allowed");
      if (!(e.weight > 0.0)) throw NegativeWeight("edge weights must be positive");
      folded[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
    }
    edges_.reserve(folded.size());
    for (const auto& [key, w] : folded) edges_.push_back({key.first, key.second, w});

    degree_.assign(n_, 0.0);
    total_edge_w_ = 0.0;
    for (const Edge& e : edges_) {
      degree_[e.u] += e.weight;
      degree_[e.v] += e.weight;
      total_edge_w_ += e.weight;
    }

    if (degree_mode_) {
      w_ = degree_;
    } else {
      if (static_cast<int>(vertex_weights.size()) != n_)
        throw DimensionMismatch("vertex weight count does not match n");
      for (double w : vertex_weights)
        if (w < 0.0) throw NegativeWeight("vertex weights must be nonnegative");
      w_ = std::move(vertex_weights);
    }
    total_w_ = 0.0;
    for (double w : w_) total_w_ += w;
    if (!(total_w_ > 0.0)) throw ZeroWeight("total vertex weight must be positive");
  }

  int n_;
  bool degree_mode_;
  std::vector<Edge> edges_;
  std::vector<double> w_;
  std::vector<double> degree_;
  double total_w_ = 0.0;
  double total_edge_w_ = 0.0;
};

class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int n) : n_(n), in_(n, 0) {}

  static VertexSet of(int n, std::initializer_list<int> members) {
    VertexSet s(n);
    for (int u : members) s.add(u);
    return s;
  }

  static VertexSet full(int n) {
    VertexSet s(n);
    for (int u = 0; u < n; ++u) s.add(u);
    return s;
  }

  int n() const { return n_; }
  int count() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(int u) const { return in_[u] != 0; }

  void add(int u) {
    if (u < 0 || u >= n_) throw Error("vertex out of range");
    if (!in_[u]) {
      in_[u] = 1;
      ++count_;
    }
  }

  void remove(int u) {
    if (u < 0 || u >= n_) throw Error("vertex out of range");
    if (in_[u]) {
      in_[u] = 0;
      --count_;
    }
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(count_);
    for (int u = 0; u < n_; ++u)
      if (in_[u]) out.push_back(u);
    return out;
  }

  VertexSet complement() const {
    VertexSet s(n_);
    for (int u = 0; u < n_; ++u)
      if (!in_[u]) s.add(u);
    return s;
  }

  VertexSet minus(const VertexSet& other) const {
    check_same(other);
    VertexSet s(n_);
    for (int u = 0; u < n_; ++u)
      if (in_[u] && !other.in_[u]) s.add(u);
    return s;
  }

  VertexSet unite(const VertexSet& other) const {
    check_same(other);
    VertexSet s(n_);
    for (int u = 0; u < n_; ++u)
      if (in_[u] || other.in_[u]) s.add(u);
    return s;
  }

  bool intersects(const VertexSet& other) const {
    check_same(other);
    for (int u = 0; u < n_; ++u)
      if (in_[u] && other.in_[u]) return true;
    return false;
  }

  bool operator==(const VertexSet& other) const { return n_ == other.n_ && in_ == other.in_; }

 private:
  void check_same(const VertexSet& other) const {
    if (n_ != other.n_) throw DimensionMismatch("vertex sets over different universes");
  }

  int n_ = 0;
  int count_ = 0;
  std::vector<char> in_;
};

struct Partition {
  std::vector<VertexSet> blocks;
};

inline void validate_partition(const Graph& g, const Partition& p, bool require_full) {
  std::vector<char> seen(g.n(), 0);
  for (const VertexSet& b : p.blocks) {
    if (b.n() != g.n()) throw NotAPartition("block over wrong universe");
    if (b.empty()) throw NotAPartition("empty block");
    for (int u : b.members()) {
      if (seen[u]) throw NotAPartition("blocks overlap");
      seen[u] = 1;
    }
  }
  if (require_full)
    for (int u = 0; u < g.n(); ++u)
      if (!seen[u]) throw NotAPartition("blocks do not cover all vertices");
}

inline double cut_weight(const Graph& g, const VertexSet& s) {
  if (s.n() != g.n()) throw DimensionMismatch("set over wrong universe");
  double cut = 0.0;
  for (const Edge& e : g.edges())
    if (s.contains(e.u) != s.contains(e.v)) cut += e.weight;
  return cut;
}

inline double set_weight(const Graph& g, const VertexSet& s) {
  if (s.n() != g.n()) throw DimensionMismatch("set over wrong universe");
  double w = 0.0;
  for (int u = 0; u < g.n(); ++u)
    if (s.contains(u)) w += g.vertex_weight(u);
  return w;
}

inline double internal_weight(const Graph& g, const VertexSet& s) {
  double w = 0.0;
  for (const Edge& e : g.edges())
    if (s.contains(e.u) && s.contains(e.v)) w += e.weight;
  return w;
}

inline double expansion(const Graph& g, const VertexSet& s) {
  if (s.empty()) throw EmptySet("expansion of the empty set");
  const double w = set_weight(g, s);
  if (!(w > 0.0)) throw ZeroWeight("expansion of a zero-weight set");
  return cut_weight(g, s) / w;
}

inline double max_expansion(const Graph& g, const Partition& p) {
  if (p.blocks.empty()) throw EmptySet("partition has no blocks");
  double m = 0.0;
  for (const VertexSet& b : p.blocks) m = std::max(m, expansion(g, b));
  return m;
}

// Boundary-plus-internal-variation functional over a set, with per-vertex
// squared norms supplied by the caller (typically a Gram diagonal):
//   sum over crossing edges (u in s) of w_e * |u|^2
// + sum over internal edges of w_e * | |u|^2 - |v|^2 |.
inline double nu(const Graph& g, const VertexSet& s, std::span<const double> norms_sq) {
  if (s.n() != g.n() || static_cast<int>(norms_sq.size()) != g.n())
    throw DimensionMismatch("nu: dimensions do not match the graph");
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const bool a = s.contains(e.u), b = s.contains(e.v);
    if (a && b)
      total += e.weight * std::abs(norms_sq[e.u] - norms_sq[e.v]);
    else if (a)
      total += e.weight * norms_sq[e.u];
    else if (b)
      total += e.weight * norms_sq[e.v];
  }
  return total;
}

}  // namespace sparsek
