#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sparsek/separators.hpp"

namespace sparsek {

enum class RoundingMode { plain, balanced };

struct RoundingConfig {
  int k = 2;
  double epsilon = 0.4;
  long t_cap = 0;       // 0: min(2n/alpha, 2e6)
  int repetitions = 0;  // 0: min(n, 32); used by the partition/balanced drivers
  RoundingMode mode = RoundingMode::plain;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 2) throw BadK("rounding needs k >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw BadParams("epsilon must lie in (0,1)");
  }
};

enum class Stage { sample, trimmed, peeled, rounded };

// One set moving through the pipeline: S (sample) -> S' (trimmed) ->
// S'' (peeled) -> P (threshold-rounded). Rounded candidates keep the
// provenance statistics of their peeled set.
struct CandidateSet {
  Stage stage = Stage::sample;
  VertexSet members;
  double mu = 0.0;      // measure of the set at this stage (rounded: of S'')
  double nu = 0.0;      // rounded: nu(S'')
  double lambda = 0.0;  // mu(S'') / k
  double threshold_r = std::numeric_limits<double>::quiet_NaN();
  double expansion = std::numeric_limits<double>::infinity();
  double weight = 0.0;  // vertex weight of the members (original units)
  int sample_index = -1;
};

// Measure trim: keep the sample iff mu(S) <= 1 + eps/2.
inline CandidateSet trim_by_measure(const SeparatorSample& s, const EmbeddedPoints& points,
                                    double epsilon) {
  CandidateSet out;
  out.stage = Stage::trimmed;
  const double mu_s = measure(points, s.members);
  if (mu_s <= 1.0 + epsilon / 2.0) {
    out.members = s.members;
    out.mu = mu_s;
  } else {
    out.members = VertexSet(points.n());
    out.mu = 0.0;
  }
  return out;
}

// Peeling: subtract previously covered vertices, in sampling order.
inline std::vector<CandidateSet> peel(const std::vector<CandidateSet>& trimmed,
                                      const EmbeddedPoints& points) {
  std::vector<CandidateSet> out;
  out.reserve(trimmed.size());
  VertexSet covered(points.n());
  for (const CandidateSet& c : trimmed) {
    CandidateSet p;
    p.stage = Stage::peeled;
    p.sample_index = c.sample_index;
    p.members = c.members.minus(covered);
    p.mu = measure(points, p.members);
    covered = covered.unite(c.members);
    out.push_back(std::move(p));
  }
  return out;
}

// Threshold rounding: P = {u in S'' : |u|^2 >= r} with r chosen among the distinct
// norm values to minimize expansion; ties prefer larger weight, then smaller
// r. Balanced mode instead minimizes subject to mu(L_r) >= (1-eps/2) mu(S'').
inline CandidateSet threshold_round(const Graph& g, const EmbeddedPoints& points,
                                    const CandidateSet& peeled, RoundingMode mode,
                                    double epsilon) {
  if (peeled.members.empty()) throw EmptyCandidate("threshold_round on an empty set");
  const std::vector<int> mem = peeled.members.members();

  CandidateSet out;
  out.stage = Stage::rounded;
  out.sample_index = peeled.sample_index;
  out.mu = measure(points, peeled.members);
  const Vector& norms = points.norms_sq;
  out.nu = nu(g, peeled.members, std::span<const double>(norms.data(), norms.size()));

  std::vector<double> levels;
  levels.reserve(mem.size());
  for (int u : mem) levels.push_back(norms[u]);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  bool found = false;
  double best_exp = std::numeric_limits<double>::infinity();
  double best_w = -1.0;
  double best_r = 0.0;
  VertexSet best_set;
  for (double r : levels) {
    VertexSet level(points.n());
    for (int u : mem)
      if (norms[u] >= r) level.add(u);
    if (mode == RoundingMode::balanced &&
        measure(points, level) < (1.0 - epsilon / 2.0) * out.mu - 1e-12)
      continue;
    const double w = set_weight(g, level);
    if (!(w > 0.0)) continue;
    const double exp_r = cut_weight(g, level) / w;
    const bool better = exp_r < best_exp || (exp_r == best_exp && w > best_w) ||
                        (exp_r == best_exp && w == best_w && r < best_r);
    if (!found || better) {
      found = true;
      best_exp = exp_r;
      best_w = w;
      best_r = r;
      best_set = level;
    }
  }
  if (found) {
    out.members = best_set;
    out.threshold_r = best_r;
    out.expansion = best_exp;
    out.weight = best_w;
  } else {
    out.members = VertexSet(points.n());  // all candidate levels had zero weight
  }
  return out;
}

namespace detail {
inline long stable_floor(double x) { return static_cast<long>(std::floor(x + 1e-9)); }
inline long stable_ceil(double x) { return static_cast<long>(std::ceil(x - 1e-9)); }

inline bool candidate_order(const CandidateSet& a, const CandidateSet& b) {
  if (a.expansion != b.expansion) return a.expansion < b.expansion;
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.sample_index < b.sample_index;
}
}  // namespace detail

struct Selection {
  std::vector<CandidateSet> sets;
  int target = 0;
  bool shortfall = false;
};

// Selection: up to ceil((1-eps)k) non-empty sets of smallest expansion.
inline Selection select_sets(std::vector<CandidateSet> candidates, int k, double epsilon) {
  Selection sel;
  sel.target = static_cast<int>(detail::stable_ceil((1.0 - epsilon) * k));
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                  [](const CandidateSet& c) { return c.members.empty(); }),
                   candidates.end());
  std::sort(candidates.begin(), candidates.end(), detail::candidate_order);
  if (static_cast<int>(candidates.size()) > sel.target) candidates.resize(sel.target);
  sel.shortfall = static_cast<int>(candidates.size()) < sel.target;
  sel.sets = std::move(candidates);
  return sel;
}

// Balanced variant: take sets in expansion order until their rescaled weight
// reaches (1-eps)k, the mass the merge step needs.
inline Selection select_by_mass(std::vector<CandidateSet> candidates, int k, double epsilon,
                                double weight_scale) {
  Selection sel;
  sel.target = 0;
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                  [](const CandidateSet& c) { return c.members.empty(); }),
                   candidates.end());
  std::sort(candidates.begin(), candidates.end(), detail::candidate_order);
  const double mass_target = (1.0 - epsilon) * k;
  double mass = 0.0;
  std::vector<CandidateSet> taken;
  for (CandidateSet& c : candidates) {
    if (mass >= mass_target - 1e-12) break;
    mass += c.weight * weight_scale;
    taken.push_back(std::move(c));
  }
  sel.shortfall = mass < mass_target - 1e-12;
  sel.sets = std::move(taken);
  return sel;
}

struct DisjointRounding {
  std::vector<CandidateSet> selected;     // sorted by expansion
  std::vector<CandidateSet> all_rounded;  // every non-empty peeled set
  int k = 0;
  double epsilon = 0.0;
  RoundingMode mode = RoundingMode::plain;
  int target = 0;
  bool shortfall = false;
  bool covered_all = false;
  double covered_measure = 0.0;
  double z_value = 0.0;          // (1/k) sum nu(S''_i)
  long certificate_count = 0;    // |{i : nu/mu <= 3Z/eps}|
  long samples_drawn = 0;
  long trimmed_empty = 0;
  long peeled_empty = 0;
  double selected_mu = 0.0;
  double selected_weight = 0.0;  // original units
  double max_expansion = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

// The full sample/trim/peel/round/select loop with the rescaled separator
// (m = 12k/eps, beta = 1 - eps/4, alpha = 1/n). Sampling stops early once
// every vertex is covered; the peel is performed streaming, which matches
// peel() applied to the full trimmed sequence.
inline DisjointRounding round_disjoint(const Graph& g, const EmbeddedPoints& points,
                                       const RoundingConfig& cfg) {
  cfg.validate();
  const int n = points.n();
  if (g.n() != n) throw DimensionMismatch("embedding does not match graph");
  const SeparatorParams params = SeparatorParams::pipeline(cfg.k, cfg.epsilon, n);
  long t_cap = cfg.t_cap;
  if (t_cap <= 0)
    t_cap = std::min<long>(static_cast<long>(std::ceil(2.0 * n / params.alpha)), 2000000L);

  DisjointRounding out;
  out.k = cfg.k;
  out.epsilon = cfg.epsilon;
  out.mode = cfg.mode;
  out.seed = cfg.seed;

  VertexSet covered(n);
  for (long i = 0; i < t_cap; ++i) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
    SeparatorSample sample = sample_separator(points, params, rng);
    ++out.samples_drawn;
    CandidateSet trimmed = trim_by_measure(sample, points, cfg.epsilon);
    trimmed.sample_index = static_cast<int>(i);
    if (trimmed.members.empty()) {
      ++out.trimmed_empty;
      continue;
    }
    CandidateSet peeled;
    peeled.stage = Stage::peeled;
    peeled.sample_index = trimmed.sample_index;
    peeled.members = trimmed.members.minus(covered);
    covered = covered.unite(trimmed.members);
    if (peeled.members.empty()) {
      ++out.peeled_empty;
    } else {
      peeled.mu = measure(points, peeled.members);
      CandidateSet rounded = threshold_round(g, points, peeled, cfg.mode, cfg.epsilon);
      rounded.lambda = rounded.mu / cfg.k;
      out.all_rounded.push_back(std::move(rounded));
    }
    if (covered.count() == n) break;
  }

  out.covered_all = covered.count() == n;
  out.covered_measure = measure(points, covered);
  for (const CandidateSet& c : out.all_rounded) out.z_value += c.nu;
  out.z_value /= cfg.k;
  for (const CandidateSet& c : out.all_rounded)
    if (c.mu > 0.0 && c.nu / c.mu <= 3.0 * out.z_value / cfg.epsilon + 1e-12)
      ++out.certificate_count;

  Selection sel = cfg.mode == RoundingMode::balanced
                      ? select_by_mass(out.all_rounded, cfg.k, cfg.epsilon,
                                       cfg.k / g.total_vertex_weight())
                      : select_sets(out.all_rounded, cfg.k, cfg.epsilon);
  out.target = sel.target;
  out.shortfall = sel.shortfall;
  out.selected = std::move(sel.sets);
  for (const CandidateSet& c : out.selected) {
    out.selected_mu += c.mu;
    out.selected_weight += c.weight;
  }
  if (!out.selected.empty()) {
    out.max_expansion = 0.0;
    for (const CandidateSet& c : out.selected)
      out.max_expansion = std::max(out.max_expansion, c.expansion);
  }
  return out;
}

struct CompletedPartition {
  std::vector<VertexSet> blocks;  // k'' smallest sets, complement last
  std::vector<double> expansions;
  int k_prime = 0;
  int k_dprime = 0;
  double complement_weight_fraction = 0.0;
  double max_expansion = 0.0;
};

// Keep the floor((1-eps)k') lightest sets and assign everything else
// (dropped sets and never-covered vertices alike) to the complement block.
inline CompletedPartition complete_partition(const Graph& g, const DisjointRounding& rounding,
                                             double epsilon) {
  if (rounding.selected.empty())
    throw Error("complete_partition needs at least one non-empty set");
  const int k_prime = static_cast<int>(rounding.selected.size());
  std::vector<const CandidateSet*> by_weight;
  for (const CandidateSet& c : rounding.selected) by_weight.push_back(&c);
  std::stable_sort(by_weight.begin(), by_weight.end(),
                   [](const CandidateSet* a, const CandidateSet* b) {
                     if (a->weight != b->weight) return a->weight < b->weight;
                     return a->sample_index < b->sample_index;
                   });
  int k_dprime =
      static_cast<int>(detail::stable_floor((1.0 - epsilon) * k_prime));
  k_dprime = std::min(k_dprime, k_prime - 1);
  if (k_dprime < 0) k_dprime = 0;

  CompletedPartition out;
  out.k_prime = k_prime;
  out.k_dprime = k_dprime;
  VertexSet used(g.n());
  for (int i = 0; i < k_dprime; ++i) {
    out.blocks.push_back(by_weight[i]->members);
    used = used.unite(by_weight[i]->members);
  }
  out.blocks.push_back(used.complement());
  for (const VertexSet& b : out.blocks) {
    const double e = expansion(g, b);
    out.expansions.push_back(e);
    out.max_expansion = std::max(out.max_expansion, e);
  }
  out.complement_weight_fraction =
      set_weight(g, out.blocks.back()) / g.total_vertex_weight();
  return out;
}

struct MergedSets {
  std::vector<VertexSet> sets;
  std::vector<double> expansions;
  std::vector<double> weights;  // original units
  double low_bound = 0.0;       // w(G)/(2k)
  double high_bound = 0.0;      // (1+eps) w(G)/k
  double input_mass = 0.0;      // rescaled units (w(V) = k)
  bool dropped_light = false;
  double dropped_weight = 0.0;  // rescaled units
  double max_expansion = 0.0;
};

// Greedy merge for the balanced variant, in rescaled units where w(V) = k:
// while at least two blocks weigh <= 1/2, merge the two lightest; output the
// blocks of weight >= 1/2. At most one light block remains and is dropped.
inline MergedSets balanced_merge(const Graph& g, const std::vector<CandidateSet>& sets, int k,
                                 double epsilon) {
  const double scale = k / g.total_vertex_weight();
  struct Block {
    VertexSet members;
    double w;  // rescaled
    int idx;
  };
  std::vector<Block> blocks;
  int idx = 0;
  MergedSets out;
  for (const CandidateSet& c : sets) {
    if (c.members.empty()) continue;
    Block b{c.members, c.weight * scale, idx++};
    out.input_mass += b.w;
    blocks.push_back(std::move(b));
  }
  auto lighter = [](const Block& a, const Block& b) {
    if (a.w != b.w) return a.w < b.w;
    return a.idx < b.idx;
  };
  std::vector<Block> light, done;
  for (Block& b : blocks)
    (b.w <= 0.5 ? light : done).push_back(std::move(b));
  std::sort(light.begin(), light.end(), lighter);
  while (light.size() >= 2) {
    Block a = std::move(light[0]);
    Block b = std::move(light[1]);
    light.erase(light.begin(), light.begin() + 2);
    Block merged{a.members.unite(b.members), a.w + b.w, std::min(a.idx, b.idx)};
    if (merged.w <= 0.5)
      light.insert(std::lower_bound(light.begin(), light.end(), merged, lighter),
                   std::move(merged));
    else
      done.push_back(std::move(merged));
  }
  if (!light.empty()) {
    out.dropped_light = true;
    out.dropped_weight = light[0].w;
  }
  std::sort(done.begin(), done.end(), [](const Block& a, const Block& b) { return a.idx < b.idx; });

  out.low_bound = g.total_vertex_weight() / (2.0 * k);
  out.high_bound = (1.0 + epsilon) * g.total_vertex_weight() / k;
  for (const Block& b : done) {
    out.sets.push_back(b.members);
    out.weights.push_back(b.w / scale);
    const double e = expansion(g, b.members);
    out.expansions.push_back(e);
    out.max_expansion = std::max(out.max_expansion, e);
  }
  if (out.sets.empty()) throw InsufficientMass("no merged set reaches weight w(G)/(2k)");
  return out;
}

}  // namespace sparsek
