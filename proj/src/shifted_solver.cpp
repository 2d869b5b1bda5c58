#include "spectriples/shifted_solver.hpp"

#include <cmath>
#include <random>

namespace spectriples {

namespace {

double one_norm(const SparseMatrixXc& a) {
  double best = 0.0;
  for (Index c = 0; c < a.outerSize(); ++c) {
    double sum = 0.0;
    for (SparseMatrixXc::InnerIterator it(a, c); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

ShiftedSolver::ShiftedSolver(const SparseMatrixXc& a, ErrorKind failure, const std::string& context) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension_mismatch, context + ": non-square system");
  if (a.rows() == 0) return;
  SparseMatrixXc compressed = a;
  compressed.makeCompressed();
  lu_.analyzePattern(compressed);
  lu_.factorize(compressed);
  if (lu_.info() != Eigen::Success) throw Error(failure, context + ": factorization failed");

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXc b(a.rows());
  for (Index i = 0; i < b.size(); ++i) b(i) = Complex(dist(rng), dist(rng));
  const VectorXc x = lu_.solve(b);
  const double bnorm = b.lpNorm<1>();
  const double xnorm = x.lpNorm<1>();
  condition_ = one_norm(compressed) * xnorm / bnorm;
  if (!std::isfinite(condition_) || !x.allFinite() || condition_ > 1.0 / (100.0 * kEpsilon))
    throw Error(failure, context + ": shifted operator is numerically singular (condition estimate " +
                             std::to_string(condition_) + ")");
}

VectorXc ShiftedSolver::solve(const VectorXc& rhs) const {
  if (rhs.size() == 0) return rhs;
  return lu_.solve(rhs);
}

MatrixXc ShiftedSolver::solve(const MatrixXc& rhs) const {
  if (rhs.size() == 0) return rhs;
  return lu_.solve(rhs);
}

SparseMatrixXc shifted(const SparseMatrixXc& a, Complex z) {
  SparseMatrixXc identity(a.rows(), a.cols());
  identity.setIdentity();
  return a - z * identity;
}

}  // namespace spectriples
