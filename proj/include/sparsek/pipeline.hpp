#pragma once

#include <optional>

#include "sparsek/io.hpp"
#include "sparsek/oracles.hpp"
#include "sparsek/rounding.hpp"
#include "sparsek/solver.hpp"

namespace sparsek {

struct PipelineConfig {
  int k = 2;
  double epsilon = 0.4;
  RoundingMode mode = RoundingMode::plain;
  std::uint64_t seed = 0;
  int repetitions = 0;  // 0: min(n, 32)
  long t_cap = 0;
  TrianglePolicy policy = TrianglePolicy::eager;
  SolverConfig solver;

  int effective_repetitions(int n) const {
    return repetitions > 0 ? repetitions : std::min(n, 32);
  }
};

struct SolveArtifacts {
  SdpProblem problem;
  GramSolution solution;
  SolveStats stats;
  EmbeddedPoints points;
};

inline SolveArtifacts solve_and_embed(const Graph& g, const PipelineConfig& cfg) {
  SolveArtifacts art;
  art.problem = build_sdp(g, cfg.k, cfg.mode == RoundingMode::balanced, cfg.policy);
  std::tie(art.solution, art.stats) = solve(art.problem, cfg.solver);
  const Matrix vectors = gram_factor(art.solution);
  Vector w(g.n());
  for (int u = 0; u < g.n(); ++u) w[u] = art.problem.weights[u];
  art.points = psi_normalize(vectors, w);
  return art;
}

// Independent restarts of the set generator; the run with the smallest max
// expansion among its selected sets wins (ties: more sets, then first run).
// Run r uses master seed stream (seed, r), and samples within the run use
// (run_seed, i).
inline DisjointRounding best_round(const Graph& g, const SolveArtifacts& art,
                                   const PipelineConfig& cfg) {
  const int reps = cfg.effective_repetitions(g.n());
  std::optional<DisjointRounding> best;
  for (int r = 0; r < reps; ++r) {
    RoundingConfig rc;
    rc.k = cfg.k;
    rc.epsilon = cfg.epsilon;
    rc.t_cap = cfg.t_cap;
    rc.mode = cfg.mode;
    rc.seed = Rng::stream(cfg.seed, static_cast<std::uint64_t>(r)).next();
    DisjointRounding run = round_disjoint(g, art.points, rc);
    auto better = [](const DisjointRounding& a, const DisjointRounding& b) {
      if (a.shortfall != b.shortfall) return !a.shortfall;
      if (a.selected.size() != b.selected.size()) return a.selected.size() > b.selected.size();
      const double ea = a.selected.empty() ? std::numeric_limits<double>::infinity() : a.max_expansion;
      const double eb = b.selected.empty() ? std::numeric_limits<double>::infinity() : b.max_expansion;
      return ea < eb;
    };
    if (!best || better(run, *best)) best = std::move(run);
  }
  return *best;
}

struct RunResult {
  SolveArtifacts art;
  std::optional<DisjointRounding> rounding;
  std::optional<CompletedPartition> partition;
  std::optional<MergedSets> merged;
  std::string failure;  // non-empty when a stage could not produce output

  bool degraded() const {
    if (!art.stats.converged) return true;
    if (rounding && rounding->shortfall) return true;
    return !failure.empty();
  }
};

inline RunResult run_solve(const Graph& g, const PipelineConfig& cfg) {
  return RunResult{solve_and_embed(g, cfg)};
}

inline RunResult run_round(const Graph& g, const PipelineConfig& cfg) {
  RunResult r{solve_and_embed(g, cfg)};
  RoundingConfig rc;
  rc.k = cfg.k;
  rc.epsilon = cfg.epsilon;
  rc.t_cap = cfg.t_cap;
  rc.mode = cfg.mode;
  rc.seed = cfg.seed;
  r.rounding = round_disjoint(g, r.art.points, rc);
  return r;
}

inline RunResult run_partition(const Graph& g, const PipelineConfig& cfg) {
  RunResult r{solve_and_embed(g, cfg)};
  r.rounding = best_round(g, r.art, cfg);
  if (r.rounding->selected.empty())
    r.failure = "no non-empty sets survived rounding";
  else
    r.partition = complete_partition(g, *r.rounding, cfg.epsilon);
  return r;
}

inline RunResult run_balanced(const Graph& g, PipelineConfig cfg) {
  cfg.mode = RoundingMode::balanced;
  RunResult r{solve_and_embed(g, cfg)};
  r.rounding = best_round(g, r.art, cfg);
  if (r.rounding->selected.empty()) {
    r.failure = "no non-empty sets survived rounding";
    return r;
  }
  try {
    r.merged = balanced_merge(g, r.rounding->selected, cfg.k, cfg.epsilon);
  } catch (const InsufficientMass& e) {
    r.failure = e.what();
  }
  return r;
}

inline json sdp_json(const RunResult& r) {
  json j;
  j["objective"] = num_str(r.art.solution.objective_value);
  j["max_violation"] = num_str(r.art.solution.max_violation);
  j["converged"] = r.art.stats.converged;
  j["iterations"] = r.art.stats.iterations;
  j["objective_bracket"] = num_str(r.art.stats.objective_bracket);
  j["lazy_constraints_added"] = r.art.stats.lazy_added;
  j["lazy_rounds"] = r.art.stats.lazy_rounds_used;
  j["psi_gram_clip"] = num_str(r.art.points.gram_clip);
  j["balanced_weight_scale"] = num_str(r.art.problem.weight_scale);
  return j;
}

inline json rounding_json(const Graph& g, const DisjointRounding& d) {
  json j;
  j["k_prime"] = static_cast<int>(d.selected.size());
  j["target"] = d.target;
  j["shortfall"] = d.shortfall;
  j["covered_all"] = d.covered_all;
  j["covered_measure"] = num_str(d.covered_measure);
  j["z_value"] = num_str(d.z_value);
  j["certificate_count"] = d.certificate_count;
  j["samples_drawn"] = d.samples_drawn;
  j["trimmed_empty"] = d.trimmed_empty;
  j["peeled_empty"] = d.peeled_empty;
  j["selected_measure"] = num_str(d.selected_mu);
  j["selected_weight"] = num_str(d.selected_weight);
  (void)g;
  return j;
}

inline json sets_json(const Graph& g, const DisjointRounding& d) {
  json arr = json::array();
  for (const CandidateSet& c : d.selected) {
    json s = set_json(g, c.members);
    s["mu"] = num_str(c.mu);
    s["nu"] = num_str(c.nu);
    s["lambda"] = num_str(c.lambda);
    s["threshold_r"] = num_str(c.threshold_r);
    s["sample_index"] = c.sample_index;
    arr.push_back(std::move(s));
  }
  return arr;
}

// Full report for the round/partition/balanced subcommands.
inline json report_json(const Graph& g, const RunResult& r, const RunManifest& manifest) {
  json rep;
  rep["manifest"] = manifest_json(manifest);
  rep["graph"] = graph_json(g);
  rep["sdp"] = sdp_json(r);
  if (!r.failure.empty()) rep["failure"] = r.failure;
  if (r.rounding) {
    rep["rounding"] = rounding_json(g, *r.rounding);
    rep["sets"] = sets_json(g, *r.rounding);
    double maxexp = 0.0;
    bool have = false;
    for (const CandidateSet& c : r.rounding->selected) {
      maxexp = std::max(maxexp, expansion(g, c.members));
      have = true;
    }
    rep["max_expansion"] = have ? num_str(maxexp) : "nan";
  }
  if (r.partition) {
    json p;
    p["k_prime"] = r.partition->k_prime;
    p["k_dprime"] = r.partition->k_dprime;
    p["complement_weight_fraction"] = num_str(r.partition->complement_weight_fraction);
    json blocks = json::array();
    for (const VertexSet& b : r.partition->blocks) blocks.push_back(set_json(g, b));
    p["blocks"] = std::move(blocks);
    p["max_expansion"] = num_str(r.partition->max_expansion);
    rep["partition"] = std::move(p);
    rep["max_expansion"] = num_str(r.partition->max_expansion);
  }
  if (r.merged) {
    json b;
    b["count"] = static_cast<int>(r.merged->sets.size());
    b["input_mass"] = num_str(r.merged->input_mass);
    b["weight_low_bound"] = num_str(r.merged->low_bound);
    b["weight_high_bound"] = num_str(r.merged->high_bound);
    b["dropped_light"] = r.merged->dropped_light;
    b["dropped_weight"] = num_str(r.merged->dropped_weight);
    json sets = json::array();
    for (size_t i = 0; i < r.merged->sets.size(); ++i) sets.push_back(set_json(g, r.merged->sets[i]));
    b["sets"] = std::move(sets);
    b["max_expansion"] = num_str(r.merged->max_expansion);
    rep["balanced"] = std::move(b);
    rep["max_expansion"] = num_str(r.merged->max_expansion);
  }
  return rep;
}

inline json oracle_json(const Graph& g, const BruteForceResult& bf) {
  json j;
  j["opt_value"] = num_str(bf.value);
  json blocks = json::array();
  for (const VertexSet& b : bf.partition.blocks) blocks.push_back(b.members());
  j["opt_partition"] = std::move(blocks);
  j["enumerated"] = bf.enumerated;
  (void)g;
  return j;
}

}  // namespace sparsek
