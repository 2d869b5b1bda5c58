#pragma once

#include <Eigen/SparseLU>

#include "spectriples/types.hpp"

namespace spectriples {

/// Sparse LU of a square complex matrix with a conditioning guard.
///
/// The condition number is bounded from below by ||A||_1 ||x||_1 / ||b||_1 for a
/// fixed pseudo-random right-hand side b; the factorization is rejected with
/// `failure` when that estimate exceeds 1/(100 eps).
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseMatrixXc& a, ErrorKind failure, const std::string& context);

  VectorXc solve(const VectorXc& rhs) const;
  MatrixXc solve(const MatrixXc& rhs) const;

  double condition_estimate() const { return condition_; }

 private:
  Eigen::SparseLU<SparseMatrixXc, Eigen::COLAMDOrdering<int>> lu_;
  double condition_ = 0.0;
};

/// A - z I for a sparse matrix.
SparseMatrixXc shifted(const SparseMatrixXc& a, Complex z);

}  // namespace spectriples
