#pragma once

#include "netiqc/affine_form.hpp"

namespace netiqc {

struct SymmetricEigen {
  VectorXr values;   // ascending
  MatrixXr vectors;  // orthonormal columns, same order
};

/// Cyclic Jacobi eigendecomposition with a fixed row-major sweep order.
/// Throws std::invalid_argument when m is not symmetric to 1e-12 relative.
SymmetricEigen eig_sym(const MatrixXr& m);

/// Matrices up to this order are projected with eig_sym; larger ones use
/// Eigen's tridiagonal QR solver.
inline constexpr int kJacobiMaxOrder = 16;

/// Frobenius-nearest negative (positive) semidefinite matrix.
MatrixXr project_nsd(const MatrixXr& m);
MatrixXr project_psd(const MatrixXr& m);

/// Largest eigenvalue of a symmetric matrix (-inf for order 0).
double max_eigenvalue(const MatrixXr& m);

}  // namespace netiqc
