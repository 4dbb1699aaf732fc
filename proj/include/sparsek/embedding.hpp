#pragma once

#include "sparsek/graph.hpp"
#include "sparsek/linalg.hpp"

namespace sparsek {

// Unit vectors psi(u) realizing <psi(u),psi(v)> = <u,v> / max(|u|^2,|v|^2),
// together with the original squared norms and the vertex measure
// mu({u}) = w_u |u|^2.
struct EmbeddedPoints {
  Matrix psi;      // n x r, rows are unit vectors
  Vector norms_sq; // |u|^2 of the input vectors
  Vector mu;       // w_u * norms_sq[u]
  double gram_clip = 0.0;     // magnitude of the most negative eigenvalue clipped
  double max_unit_dev = 0.0;  // worst | |psi_u|^2 - 1 | before renormalization

  int n() const { return static_cast<int>(psi.rows()); }
  int dim() const { return static_cast<int>(psi.cols()); }
  double mu_total() const { return mu.sum(); }

  double inner(int u, int v) const { return psi.row(u).dot(psi.row(v)); }
};

// The normalized Gram matrix is factorized rather than transformed
// coordinate-wise; psi is only defined through inner products. Slightly
// indefinite inputs (solver round-off) are clipped to the PSD cone and the
// perturbation recorded.
inline EmbeddedPoints psi_normalize(const Matrix& vectors, const Vector& vertex_weights) {
  const int n = static_cast<int>(vectors.rows());
  if (static_cast<int>(vertex_weights.size()) != n)
    throw DimensionMismatch("psi_normalize: weights do not match vector count");
  EmbeddedPoints out;
  out.norms_sq = vectors.rowwise().squaredNorm();
  for (int u = 0; u < n; ++u)
    if (out.norms_sq[u] < 1e-10) throw ZeroVector("psi_normalize: zero vector");

  Matrix gram = vectors * vectors.transpose();
  Matrix normalized(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v)
      normalized(u, v) = gram(u, v) / std::max(out.norms_sq[u], out.norms_sq[v]);
    normalized(u, u) = 1.0;
  }

  SymEigen e = sym_eigen(normalized);
  out.gram_clip = std::max(0.0, -e.values[0]);
  int kept = 0;
  for (int j = 0; j < n; ++j)
    if (e.values[j] > 1e-12) ++kept;
  out.psi.resize(n, std::max(kept, 1));
  out.psi.setZero();
  int c = 0;
  for (int j = 0; j < n; ++j) {
    if (e.values[j] > 1e-12) {
      out.psi.col(c) = std::sqrt(e.values[j]) * e.vectors.col(j);
      ++c;
    }
  }
  for (int u = 0; u < n; ++u) {
    const double len2 = out.psi.row(u).squaredNorm();
    out.max_unit_dev = std::max(out.max_unit_dev, std::abs(len2 - 1.0));
    if (len2 <= 0.0) throw ZeroVector("psi_normalize: degenerate normalized vector");
    out.psi.row(u) /= std::sqrt(len2);
  }

  out.mu = Vector(n);
  for (int u = 0; u < n; ++u) out.mu[u] = vertex_weights[u] * out.norms_sq[u];
  return out;
}

inline double measure(const EmbeddedPoints& points, const VertexSet& s) {
  if (s.n() != points.n()) throw DimensionMismatch("measure: set over wrong universe");
  double total = 0.0;
  for (int u = 0; u < points.n(); ++u)
    if (s.contains(u)) total += points.mu[u];
  return total;
}

}  // namespace sparsek
