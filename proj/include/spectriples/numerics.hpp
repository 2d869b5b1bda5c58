#pragma once

// Dense linear-algebra substrate. Everything here is a pure function of its
// inputs and templated on the Eigen expression type, so real and complex
// matrices share one code path.

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "spectriples/types.hpp"

namespace spectriples {

template <typename Scalar>
struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

struct Inertia {
  Index n_minus = 0;
  Index n_zero = 0;
  Index n_plus = 0;
  double zero_threshold = 0.0;
  /// Some eigenvalue sits within a factor 10 of the threshold.
  bool ambiguous = false;
  /// Sign count of an LDL^* congruence agrees; empty when the check was not applicable.
  std::optional<bool> ldl_agrees;

  Index dimension() const { return n_minus + n_zero + n_plus; }
};

/// Relative asymmetry ||M - M^*||_F / ||M||_F (0 for the zero matrix).
template <typename Derived>
double relative_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTolerance) {
  return m.rows() == m.cols() && relative_asymmetry(m) <= tol;
}

/// (M + M^*)/2 after checking M is Hermitian within `tol`.
template <typename Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived>& m,
                                             double tol = kHermitianTolerance) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::dimension_mismatch, "Hermitian operation on a non-square matrix");
  const double asym = relative_asymmetry(m);
  if (asym > tol)
    throw Error(ErrorKind::not_hermitian,
                "relative asymmetry " + std::to_string(asym) + " exceeds " + std::to_string(tol));
  return (m + m.adjoint()) / 2.0;
}

template <typename Derived>
EigenDecomposition<typename Derived::Scalar> hermitian_eigen(const Eigen::MatrixBase<Derived>& m,
                                                             double tol = kHermitianTolerance) {
  using Plain = typename Derived::PlainObject;
  const Plain sym = hermitian_part(m, tol);
  EigenDecomposition<typename Derived::Scalar> out;
  if (sym.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Plain> solver(sym);
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

template <typename Derived>
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m,
                                      double tol = kHermitianTolerance) {
  using Plain = typename Derived::PlainObject;
  const Plain sym = hermitian_part(m, tol);
  if (sym.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Plain> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Spectral norm of a Hermitian matrix from its eigenvalues.
inline double spectral_radius(const Eigen::VectorXd& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

inline double default_zero_threshold(const Eigen::VectorXd& eigenvalues) {
  return 1e-8 * spectral_radius(eigenvalues);
}

/// M^s by spectral calculus; M must be Hermitian positive definite.
template <typename Derived>
typename Derived::PlainObject fractional_power(const Eigen::MatrixBase<Derived>& m, double s,
                                               std::optional<double> zero_threshold = {}) {
  const auto eig = hermitian_eigen(m);
  if (eig.values.size() == 0) return typename Derived::PlainObject(0, 0);
  const double threshold = zero_threshold.value_or(default_zero_threshold(eig.values));
  if (eig.values.minCoeff() <= threshold)
    throw Error(ErrorKind::not_positive_definite,
                "minimum eigenvalue " + std::to_string(eig.values.minCoeff()) + " <= " +
                    std::to_string(threshold));
  const Eigen::VectorXd powered = eig.values.array().pow(s).matrix();
  return eig.vectors * powered.asDiagonal() * eig.vectors.adjoint();
}

/// Inertia from an already computed (ascending or not) eigenvalue list.
inline Inertia inertia_from_eigenvalues(const Eigen::VectorXd& eigenvalues,
                                        std::optional<double> zero_threshold = {}) {
  Inertia out;
  out.zero_threshold = zero_threshold.value_or(default_zero_threshold(eigenvalues));
  const double t = out.zero_threshold;
  for (double lambda : eigenvalues) {
    if (lambda < -t)
      ++out.n_minus;
    else if (lambda <= t)
      ++out.n_zero;
    else
      ++out.n_plus;
    const double a = std::abs(lambda);
    if (a <= 10.0 * t && (t == 0.0 ? a == 0.0 : a >= t / 10.0)) out.ambiguous = true;
  }
  return out;
}

template <typename Derived>
Inertia inertia(const Eigen::MatrixBase<Derived>& m, std::optional<double> zero_threshold = {}) {
  using Plain = typename Derived::PlainObject;
  const Plain sym = hermitian_part(m);
  const Eigen::VectorXd values = hermitian_eigenvalues(sym);
  Inertia out = inertia_from_eigenvalues(values, zero_threshold);

  // Congruence cross-check (Sylvester): P^T A P = L D L^* has the inertia of D.
  if (out.n_zero == 0 && !out.ambiguous && sym.rows() > 0) {
    Eigen::LDLT<Plain> ldlt(sym);
    if (ldlt.info() == Eigen::Success) {
      Index neg = 0, pos = 0;
      for (Index i = 0; i < ldlt.vectorD().size(); ++i) {
        const double d = std::real(ldlt.vectorD()(i));
        if (d < 0)
          ++neg;
        else if (d > 0)
          ++pos;
      }
      out.ldl_agrees = (neg == out.n_minus && pos == out.n_plus);
    }
  }
  return out;
}

/// Singular values in descending order.
template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  if (m.size() == 0) return {};
  Eigen::BDCSVD<Plain> svd(m.eval());
  return svd.singularValues();
}

template <typename Derived, typename RhsDerived>
typename RhsDerived::PlainObject solve_linear(const Eigen::MatrixBase<Derived>& m,
                                              const Eigen::MatrixBase<RhsDerived>& rhs) {
  using Plain = typename Derived::PlainObject;
  if (m.rows() != m.cols())
    throw Error(ErrorKind::dimension_mismatch, "solve_linear needs a square matrix");
  if (m.rows() != rhs.rows())
    throw Error(ErrorKind::dimension_mismatch, "right-hand side has the wrong length");
  Eigen::PartialPivLU<Plain> lu(m.eval());
  const double rcond = lu.rcond();
  if (!(rcond >= 100.0 * kEpsilon))
    throw Error(ErrorKind::singular_system,
                "reciprocal condition estimate " + std::to_string(rcond));
  return lu.solve(rhs);
}

}  // namespace spectriples
