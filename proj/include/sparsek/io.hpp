#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsek/graph.hpp"

namespace sparsek {

using json = nlohmann::json;

// Shortest decimal string that round-trips to the same double. Reports carry
// floats in this form so that byte-for-byte stable output does not depend on
// stream formatting state.
inline std::string num_str(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Graph file format:
//   line 1:        n m
//   optional line: w w_0 w_1 ... w_{n-1}
//   m lines:       u v [weight]        (weight defaults to 1)
// '#' starts a comment; blank lines are ignored. Without a 'w' line, vertex
// weights are the weighted degrees (degree mode).
namespace detail {
inline bool token_to_int(const std::string& tok, int& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}
inline bool token_to_double(const std::string& tok, double& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}
}  // namespace detail

inline Graph parse_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  int n = -1;
  long m = -1;
  bool have_weights = false;
  std::vector<double> weights;
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (n < 0) {
      int mm = 0;
      if (tok.size() != 2 || !detail::token_to_int(tok[0], n) || !detail::token_to_int(tok[1], mm))
        throw ParseError(lineno, "expected header 'n m'");
      m = mm;
      if (n <= 0) throw ParseError(lineno, "vertex count must be positive");
      if (m < 0) throw ParseError(lineno, "edge count must be nonnegative");
      continue;
    }

    if (tok[0] == "w") {
      if (have_weights) throw ParseError(lineno, "duplicate vertex weight line");
      if (!edges.empty()) throw ParseError(lineno, "weight line must precede edges");
      if (static_cast<int>(tok.size()) != n + 1)
        throw ParseError(lineno, "expected " + std::to_string(n) + " vertex weights");
      have_weights = true;
      weights.resize(n);
      for (int u = 0; u < n; ++u) {
        if (!detail::token_to_double(tok[1 + u], weights[u]))
          throw ParseError(lineno, "bad vertex weight");
        if (weights[u] < 0.0)
          throw NegativeWeight("negative vertex weight at line " + std::to_string(lineno));
      }
      continue;
    }

    if (static_cast<long>(edges.size()) >= m) throw ParseError(lineno, "more edges than declared");
    int u = 0, v = 0;
    double w = 1.0;
    if (tok.size() < 2 || tok.size() > 3 || !detail::token_to_int(tok[0], u) ||
        !detail::token_to_int(tok[1], v))
      throw ParseError(lineno, "expected edge 'u v [weight]'");
    if (tok.size() == 3 && !detail::token_to_double(tok[2], w))
      throw ParseError(lineno, "bad edge weight");
    if (u < 0 || u >= n || v < 0 || v >= n) throw ParseError(lineno, "edge endpoint out of range");
    if (u == v) throw ParseError(lineno, "self-loop");
    if (!(w > 0.0)) throw NegativeWeight("edge weight must be positive at line " + std::to_string(lineno));
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw DuplicateEdge("duplicate edge at line " + std::to_string(lineno));
    edges.push_back({u, v, w});
  }
  if (n < 0) throw ParseError(lineno, "missing header");
  if (static_cast<long>(edges.size()) != m) throw ParseError(lineno, "fewer edges than declared");
  return have_weights ? Graph(n, std::move(edges), std::move(weights)) : Graph(n, std::move(edges));
}

inline Graph parse_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open graph file: " + path);
  return parse_graph(in);
}

inline void serialize_graph(const Graph& g, std::ostream& out) {
  out << g.n() << " " << g.edges().size() << "\n";
  if (!g.degree_mode()) {
    out << "w";
    for (double w : g.vertex_weights()) out << " " << num_str(w);
    out << "\n";
  }
  for (const Edge& e : g.edges()) out << e.u << " " << e.v << " " << num_str(e.weight) << "\n";
}

inline std::string serialize_graph(const Graph& g) {
  std::ostringstream os;
  serialize_graph(g, os);
  return os.str();
}

// Everything needed to reproduce a run; serialized into every report.
struct RunManifest {
  std::string subcommand;
  std::string input;
  int k = 0;
  double epsilon = 0.0;
  std::string mode = "plain";
  std::uint64_t seed = 0;
  int repetitions = 0;
  long t_cap = 0;
  double tol_feas = 0.0;
  std::string triangle_policy = "eager";
};

inline json manifest_json(const RunManifest& m) {
  json j;
  j["artifact_version"] = kVersion;
  j["subcommand"] = m.subcommand;
  j["input"] = m.input;
  j["k"] = m.k;
  j["epsilon"] = num_str(m.epsilon);
  j["mode"] = m.mode;
  j["seed"] = std::to_string(m.seed);
  j["repetitions"] = m.repetitions;
  j["t_cap"] = m.t_cap;
  j["tol_feas"] = num_str(m.tol_feas);
  j["triangle_policy"] = m.triangle_policy;
  return j;
}

inline json graph_json(const Graph& g) {
  json j;
  j["n"] = g.n();
  j["m"] = g.edges().size();
  j["degree_mode"] = g.degree_mode();
  j["total_vertex_weight"] = num_str(g.total_vertex_weight());
  j["total_edge_weight"] = num_str(g.total_edge_weight());
  return j;
}

inline json set_json(const Graph& g, const VertexSet& s) {
  json j;
  j["members"] = s.members();
  j["weight"] = num_str(set_weight(g, s));
  j["cut"] = num_str(cut_weight(g, s));
  j["expansion"] = num_str(expansion(g, s));
  return j;
}

// Minimal structural validation of a report against the published schema;
// returns human-readable problems (empty = valid).
inline std::vector<std::string> validate_report(const json& r, const std::string& subcommand) {
  std::vector<std::string> probs;
  auto need = [&](const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) probs.push_back(std::string(where) + " missing key '" + key + "'");
  };
  need(r, "manifest", "report");
  if (r.contains("manifest")) {
    for (const char* key : {"artifact_version", "subcommand", "input", "k", "epsilon", "mode",
                            "seed", "repetitions", "t_cap", "tol_feas", "triangle_policy"})
      need(r["manifest"], key, "manifest");
    if (r["manifest"].value("subcommand", "") != subcommand)
      probs.push_back("manifest subcommand mismatch");
  }
  if (subcommand != "gap-demo") need(r, "graph", "report");
  if (subcommand == "solve" || subcommand == "round" || subcommand == "partition" ||
      subcommand == "balanced" || subcommand == "audit-separators") {
    need(r, "sdp", "report");
    if (r.contains("sdp"))
      for (const char* key : {"objective", "max_violation", "converged", "iterations"})
        need(r["sdp"], key, "sdp");
  }
  if (subcommand == "round" || subcommand == "partition" || subcommand == "balanced") {
    need(r, "rounding", "report");
    need(r, "sets", "report");
    need(r, "max_expansion", "report");
  }
  if (subcommand == "partition") need(r, "partition", "report");
  if (subcommand == "balanced") need(r, "balanced", "report");
  if (subcommand == "oracle")
    for (const char* key : {"opt_value", "opt_partition", "enumerated"}) need(r, key, "report");
  if (subcommand == "spectrum")
    for (const char* key : {"eigenvalues", "lambda_k"}) need(r, key, "report");
  if (subcommand == "gap-demo")
    for (const char* key : {"transcript", "feasible", "alpha"}) need(r, key, "report");
  if (subcommand == "audit-separators")
    for (const char* key : {"audit"}) need(r, key, "report");
  return probs;
}

}  // namespace sparsek
