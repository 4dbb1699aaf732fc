#pragma once

#include <Eigen/Dense>

#include "sparsek/common.hpp"

namespace sparsek {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // column j pairs with values[j]
};

inline SymEigen sym_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Nearest PSD matrix in Frobenius norm; optionally reports the magnitude of
// the most negative eigenvalue that was clipped.
inline Matrix psd_project(const Matrix& a, double* clipped = nullptr) {
  SymEigen e = sym_eigen(a);
  if (clipped) *clipped = e.values.size() > 0 ? std::max(0.0, -e.values[0]) : 0.0;
  Vector lam = e.values.cwiseMax(0.0);
  return e.vectors * lam.asDiagonal() * e.vectors.transpose();
}

// Pseudo-inverse solve for small symmetric PSD systems (Gram matrices of
// constraint normals); rank-deficient rows are handled by eigenvalue drop.
class SymPinv {
 public:
  SymPinv() = default;
  explicit SymPinv(const Matrix& g, double rel_tol = 1e-12) {
    SymEigen e = sym_eigen(g);
    const double cutoff = rel_tol * std::max(1.0, e.values.cwiseAbs().maxCoeff());
    int kept = 0;
    for (int j = 0; j < e.values.size(); ++j)
      if (e.values[j] > cutoff) ++kept;
    basis_.resize(g.rows(), kept);
    inv_values_.resize(kept);
    int c = 0;
    for (int j = 0; j < e.values.size(); ++j) {
      if (e.values[j] > cutoff) {
        basis_.col(c) = e.vectors.col(j);
        inv_values_[c] = 1.0 / e.values[j];
        ++c;
      }
    }
  }

  Vector solve(const Vector& rhs) const {
    return basis_ * inv_values_.cwiseProduct(basis_.transpose() * rhs).matrix();
  }

 private:
  Matrix basis_;
  Vector inv_values_;
};

}  // namespace sparsek
