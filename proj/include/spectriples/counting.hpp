#pragma once

// Eigenvalue counts of realizations, from the boundary side and from the
// dense spectrum.
//
// The boundary side rests on the Schur-complement identity
//   #{eigenvalues of A_K below x} = #{Dirichlet eigenvalues below x} + n_-(K - Lambda(x)),
// which is what makes both counts agree integer-exactly on the grid.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectriples/boundary.hpp"
#include "spectriples/numerics.hpp"
#include "spectriples/problems.hpp"

namespace spectriples {

struct SpectralGap {
  double alpha = 0.0;
  double beta = 0.0;
  std::string source;

  double width() const { return beta - alpha; }
};

/// Gaps of a Hermitian spectrum: open intervals between consecutive
/// eigenvalues inside `window`, wider than `min_width`, ascending.
std::vector<SpectralGap> find_gaps(const SpectrumList& s, std::pair<double, double> window,
                                   double min_width);

/// Number of eigenvalues in the open interval (a, b), with multiplicity.
Index count_direct(const Realization& r, std::pair<double, double> interval);

struct CountReport {
  Index formula_count = 0;
  std::optional<Index> direct_count;
  bool ambiguous = false;
  bool rerun = false;  // recounted after a 1e-3 perturbation
  std::string problem;
  std::string k;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> epsilon;

  bool agree() const { return direct_count && *direct_count == formula_count; }
};

/// How Lambda^{-1/2} and the sign of T enter the gap formula.
///   negative_root: I + (-Lambda(0))^{-1/2} (K - T(x)) (-Lambda(0))^{-1/2}
///   as_written:    I + (-Lambda(0))^{-1/2} (K + T(x)) (-Lambda(0))^{-1/2}
enum class RootConvention { negative_root, as_written };

const char* to_string(RootConvention c);
RootConvention root_convention_from_string(const std::string& name);

/// (-Lambda(0))^{-1/2}; raises CalderonNotNegative unless Lambda(0) < 0.
MatrixXc negative_root(const BoundaryOperator& lambda0);

/// Inertia of a boundary matrix, summing label multiplicities over the
/// connected blocks of its sparsity pattern.
Inertia boundary_inertia(const MatrixXc& x, const std::vector<BoundaryLabel>& labels);

/// n_- of I + (-Lambda(0))^{-1/2} (K -/+ T(x)) (-Lambda(0))^{-1/2}.
Inertia boundary_count(const ModelProblem& p, const MatrixXc& k, double x,
                       RootConvention convention = RootConvention::negative_root);

CountReport count_negative_formula(const ModelProblem& p, const KSpec& k);
CountReport count_negative_formula(const ModelProblem& p, const MatrixXc& k);

CountReport gap_count_formula(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                              double epsilon,
                              RootConvention convention = RootConvention::negative_root);

/// Raises NotAGap when a Dirichlet eigenvalue lies in (alpha, beta).
void check_gap(const ModelProblem& p, const SpectralGap& g);

/// Largest epsilon in the grid with no A_K eigenvalue in (alpha, alpha + epsilon); 0 if none.
double left_edge_buffer(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                        const std::vector<double>& epsilon_grid);

/// Every eigenvalue lies in the closed sector |arg(lambda - vertex)| <= semi_angle + slack.
bool sector_check(const Realization& r, Complex vertex, double semi_angle, double slack);

/// Formula count paired with the dense count over (-inf, 0); recounts with
/// K scaled by 1 + 1e-3 when the boundary inertia is ambiguous.
CountReport verify_negative_count(const ModelProblem& p, const KSpec& k);

/// Formula count paired with the dense count over (alpha, beta - epsilon);
/// recounts with epsilon scaled by 1 + 1e-3 when ambiguous.
CountReport verify_gap_count(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                             double epsilon,
                             RootConvention convention = RootConvention::negative_root);

}  // namespace spectriples
