#include <catch2/catch.hpp>

#include "corpus.hpp"
#include "sparsek/oracles.hpp"
#include "sparsek/solver.hpp"

using namespace sparsek;
using namespace sparsek::testing;

namespace {

// Dense symmetric normal matrices of the equality families, for checking the
// closed-form Gram used by the projector.
std::vector<Matrix> dense_normals(const SdpProblem& prob) {
  const int n = prob.n;
  std::vector<Matrix> normals;
  Matrix mass = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) mass(u, u) = prob.weights[u];
  normals.push_back(mass);
  for (int u = 0; u < n; ++u) {
    Matrix a = Matrix::Zero(n, n);
    for (int v = 0; v < n; ++v) {
      a(u, v) += 0.5 * prob.weights[v];
      a(v, u) += 0.5 * prob.weights[v];
    }
    normals.push_back(a);
  }
  if (prob.balanced)
    for (int u = 0; u < n; ++u) {
      Matrix a = Matrix::Zero(n, n);
      a(u, u) = 1.0;
      normals.push_back(a);
    }
  return normals;
}

}  // namespace

TEST_CASE("equality projection is an exact orthogonal projection") {
  for (bool balanced : {false, true}) {
    Graph g = random_weighted(5, 0.7, 7);
    SdpProblem prob = build_sdp(g, 2, balanced);
    detail::EqualityProjector eq(prob);
    Rng rng(31);
    Matrix m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = i; j < 5; ++j) m(i, j) = m(j, i) = rng.gaussian();

    Matrix projected = m;
    eq.project(projected);
    CHECK(eq.residual(projected).cwiseAbs().maxCoeff() < 1e-10);

    // idempotent
    Matrix twice = projected;
    eq.project(twice);
    CHECK((twice - projected).cwiseAbs().maxCoeff() < 1e-10);

    // the displacement lies in the span of the constraint normals
    Matrix delta = m - projected;
    std::vector<Matrix> normals = dense_normals(prob);
    Matrix basis(25, normals.size());
    for (size_t i = 0; i < normals.size(); ++i)
      basis.col(i) = Eigen::Map<Vector>(normals[i].data(), 25);
    Vector d = Eigen::Map<Vector>(delta.data(), 25);
    Vector coeffs = basis.colPivHouseholderQr().solve(d);
    CHECK((basis * coeffs - d).norm() < 1e-9);
  }
}

TEST_CASE("solve on two disjoint triangles reaches objective zero") {
  Graph g = clique_union({3, 3});
  auto [sol, stats] = solve(build_sdp(g, 2));
  CHECK(stats.converged);
  CHECK(sol.objective_value >= -1e-12);
  CHECK(sol.objective_value <= 1e-5);
  CHECK(sol.max_violation <= 1e-6);
}

TEST_CASE("solve on P4 stays below the embedded bound") {
  Graph p4 = path_graph(4);
  auto [sol, stats] = solve(build_sdp(p4, 2));
  CHECK(stats.converged);
  CHECK(sol.objective_value <= 1.0 / 3.0 + 1e-4);
  SECTION("postcondition: feasibility report passes at tol") {
    FeasibilityReport rep = check_feasibility(build_sdp(p4, 2), sol);
    CHECK(rep.passes(1e-6));
  }
}

TEST_CASE("solver objective is below every embedded partition") {
  for (const char* which : {"P4", "K4", "2K3"}) {
    Graph g = which[0] == 'P' ? path_graph(4) : (which[0] == 'K' ? clique_graph(4) : clique_union({3, 3}));
    const int k = 2;
    auto [sol, stats] = solve(build_sdp(g, k));
    double best_embedded = std::numeric_limits<double>::infinity();
    enumerate_partitions(g.n(), k, [&](const std::vector<int>& a) {
      Partition p{std::vector<VertexSet>(k, VertexSet(g.n()))};
      for (int u = 0; u < g.n(); ++u) p.blocks[a[u]].add(u);
      best_embedded = std::min(best_embedded, embed_partition(g, p).objective_value);
    });
    INFO(which);
    CHECK(sol.objective_value <= best_embedded + 1e-4);
  }
}

TEST_CASE("solve is deterministic bit for bit") {
  Graph g = random_graph(7, 0.5, 11);
  auto [a, sa] = solve(build_sdp(g, 3));
  auto [b, sb] = solve(build_sdp(g, 3));
  CHECK((a.m - b.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.objective_value == b.objective_value);
  CHECK(sa.iterations == sb.iterations);
}

TEST_CASE("gram_factor recovers vectors") {
  SECTION("identity gives orthonormal rows") {
    GramSolution sol;
    sol.m = Matrix::Identity(3, 3);
    Matrix v = gram_factor(sol);
    CHECK(v.rows() == 3);
    CHECK((v * v.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("constant block gives identical vectors") {
    GramSolution sol;
    sol.m = Matrix::Constant(4, 4, 0.3);
    Matrix v = gram_factor(sol);
    CHECK(v.cols() == 1);
    for (int u = 0; u < 4; ++u) CHECK(v.row(u).squaredNorm() == Approx(0.3).epsilon(1e-12));
    CHECK((v.row(0) - v.row(3)).norm() < 1e-12);
  }
  SECTION("embedding factors into two orthogonal classes") {
    Graph g = clique_union({3, 3});
    Partition p{{VertexSet::of(6, {0, 1, 2}), VertexSet::of(6, {3, 4, 5})}};
    GramSolution sol = embed_partition(g, p);
    Matrix v = gram_factor(sol);
    CHECK((v * v.transpose() - sol.m).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(v.row(0).dot(v.row(4))) < 1e-9);
  }
  SECTION("indefinite input raises NotPsd") {
    GramSolution sol;
    sol.m = Matrix::Identity(2, 2);
    sol.m(0, 0) = -0.5;
    CHECK_THROWS_AS(gram_factor(sol), NotPsd);
  }
}

TEST_CASE("lazy triangle generation terminates clean") {
  Graph g = random_graph(10, 0.4, 104);
  SdpProblem prob = build_sdp(g, 2, false, TrianglePolicy::lazy);
  auto [sol, stats] = solve(prob);
  CHECK(stats.converged);

  SECTION("no triangle violation above tol remains") {
    FeasibilityReport rep = check_feasibility(prob, sol);
    CHECK(rep.triangle <= 1e-6);
  }
  SECTION("violation counts decrease across cut rounds") {
    for (size_t i = 1; i < stats.lazy_violations.size(); ++i)
      CHECK(stats.lazy_violations[i] <= stats.lazy_violations[i - 1]);
    REQUIRE_FALSE(stats.lazy_violations.empty());
    CHECK(stats.lazy_violations.back() == 0);
  }
  SECTION("lazy and eager agree on the objective") {
    auto [eager_sol, eager_stats] = solve(build_sdp(g, 2));
    CHECK(sol.objective_value == Approx(eager_sol.objective_value).margin(2e-4));
  }
}

TEST_CASE("solver output invariants on a mixed bag") {
  for (const auto& name : {"C6", "barbell4", "wP6"}) {
    const auto& corpus = desk_corpus();
    auto it = std::find_if(corpus.begin(), corpus.end(),
                           [&](const NamedGraph& ng) { return ng.name == name; });
    REQUIRE(it != corpus.end());
    SdpProblem prob = build_sdp(it->graph, 2);
    auto [sol, stats] = solve(prob);
    INFO(name);
    CHECK(stats.converged);
    CHECK(sol.max_violation <= 1e-6);
    CHECK(sym_eigen(sol.m).values[0] >= -1e-8);
    for (int u = 0; u < prob.n; ++u) CHECK(sol.m(u, u) > 0.0);
  }
}
