#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace spectriples {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using SparseMatrixXd = Eigen::SparseMatrix<double>;
using SparseMatrixXc = Eigen::SparseMatrix<Complex>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

/// Relative asymmetry allowed before a matrix is rejected as non-Hermitian.
constexpr double kHermitianTolerance = 1e-10;

enum class ErrorKind {
  not_hermitian,
  not_positive_definite,
  singular_system,
  invalid_config,
  dimension_mismatch,
  dirichlet_eigenvalue_hit,
  calderon_not_negative,
  not_hermitian_k,
  not_a_gap,
  epsilon_too_large,
  spectrum_hit,
  invalid_combination,
  insufficient_tail,
  unknown_key,
  missing_key,
  invalid_value,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_hermitian: return "NotHermitian";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::invalid_config: return "InvalidConfig";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::dirichlet_eigenvalue_hit: return "DirichletEigenvalueHit";
    case ErrorKind::calderon_not_negative: return "CalderonNotNegative";
    case ErrorKind::not_hermitian_k: return "NotHermitianK";
    case ErrorKind::not_a_gap: return "NotAGap";
    case ErrorKind::epsilon_too_large: return "EpsilonTooLarge";
    case ErrorKind::spectrum_hit: return "SpectrumHit";
    case ErrorKind::invalid_combination: return "InvalidCombination";
    case ErrorKind::insufficient_tail: return "InsufficientTail";
    case ErrorKind::unknown_key: return "UnknownKey";
    case ErrorKind::missing_key: return "MissingKey";
    case ErrorKind::invalid_value: return "InvalidValue";
  }
  return "Error";
}

}  // namespace spectriples
