#include <catch2/catch.hpp>

#include "corpus.hpp"
#include "sparsek/embedding.hpp"
#include "sparsek/sdp.hpp"
#include "sparsek/solver.hpp"

using namespace sparsek;
using namespace sparsek::testing;

TEST_CASE("psi inner products follow the normalization formula") {
  SECTION("norms 4 and 1 with inner product 1 maps to 1/4") {
    Matrix v(2, 2);
    v.row(0) << 2.0, 0.0;                  // |u|^2 = 4
    v.row(1) << 0.5, std::sqrt(0.75);      // |v|^2 = 1, <u,v> = 1
    EmbeddedPoints pts = psi_normalize(v, Vector::Ones(2));
    CHECK(pts.inner(0, 1) == Approx(0.25).margin(1e-9));
    CHECK(pts.inner(0, 0) == Approx(1.0).margin(1e-12));
  }
  SECTION("orthogonal inputs stay orthogonal") {
    Matrix v = Matrix::Identity(3, 3) * 2.0;
    EmbeddedPoints pts = psi_normalize(v, Vector::Ones(3));
    CHECK(pts.inner(0, 1) == Approx(0.0).margin(1e-12));
  }
  SECTION("zero vector is rejected") {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 1.0;
    CHECK_THROWS_AS(psi_normalize(v, Vector::Ones(2)), ZeroVector);
  }
}

TEST_CASE("measure sums w_u |u|^2") {
  Graph g = clique_union({3, 3});
  Partition p{{VertexSet::of(6, {0, 1, 2}), VertexSet::of(6, {3, 4, 5})}};
  GramSolution sol = embed_partition(g, p);
  Matrix vectors = gram_factor(sol);
  Vector w(6);
  for (int u = 0; u < 6; ++u) w[u] = g.vertex_weight(u);
  EmbeddedPoints pts = psi_normalize(vectors, w);

  CHECK(measure(pts, VertexSet(6)) == 0.0);
  CHECK(measure(pts, VertexSet::of(6, {0, 1, 2})) == Approx(1.0).epsilon(1e-9));
  CHECK(pts.mu_total() == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("psi of an integral solution separates blocks exactly") {
  Graph g = clique_union({3, 3});
  Partition p{{VertexSet::of(6, {0, 1, 2}), VertexSet::of(6, {3, 4, 5})}};
  Matrix vectors = gram_factor(embed_partition(g, p));
  Vector w(6);
  for (int u = 0; u < 6; ++u) w[u] = g.vertex_weight(u);
  EmbeddedPoints pts = psi_normalize(vectors, w);

  CHECK(pts.inner(0, 1) == Approx(1.0).margin(1e-9));
  CHECK(pts.inner(0, 2) == Approx(1.0).margin(1e-9));
  CHECK(pts.inner(0, 3) == Approx(0.0).margin(1e-9));
  CHECK(pts.inner(2, 5) == Approx(0.0).margin(1e-9));
}

TEST_CASE("embedded points from solved instances") {
  for (const char* name : {"P4", "2K3", "C6"}) {
    Graph g = name[0] == 'P' ? path_graph(4) : (name[0] == '2' ? clique_union({3, 3}) : cycle_graph(6));
    SdpProblem prob = build_sdp(g, 2);
    auto [sol, stats] = solve(prob);
    REQUIRE(stats.converged);
    Matrix vectors = gram_factor(sol);
    Vector w(g.n());
    for (int u = 0; u < g.n(); ++u) w[u] = prob.weights[u];
    EmbeddedPoints pts = psi_normalize(vectors, w);
    INFO(name);

    for (int u = 0; u < g.n(); ++u)
      CHECK(std::abs(pts.psi.row(u).squaredNorm() - 1.0) <= 1e-9);
    CHECK(pts.mu_total() == Approx(2.0).margin(1e-5));
    CHECK(pts.gram_clip <= 1e-6);
    for (int u = 0; u < g.n(); ++u)
      for (int v = u + 1; v < g.n(); ++v) {
        const double lhs = (pts.psi.row(u) - pts.psi.row(v)).squaredNorm();
        const double duv = (vectors.row(u) - vectors.row(v)).squaredNorm();
        const double rhs = 2.0 * duv / std::max(pts.norms_sq[u], pts.norms_sq[v]);
        CHECK(lhs <= rhs + 1e-6);
      }
  }
}
