#pragma once

// Resolvent-power differences and their singular-value decay.

#include <optional>
#include <string>
#include <vector>

#include "spectriples/problems.hpp"

namespace spectriples {

/// (r1 - z)^{-l} - (r2 - z)^{-l} on the field space; a realization acts as zero
/// on field dofs it does not carry. Dense, for small problems.
MatrixXc resolvent_power_difference(const Realization& r1, const Realization& r2, Complex z, int l);

/// Singular values of one decoupled block of the difference.
struct BlockSingularValues {
  std::vector<Index> source_blocks;  // problem blocks (modes) the block spans
  int multiplicity = 1;
  Eigen::VectorXd values;            // descending
  Index rank_bound = 0;
};

/// Block-by-block singular values from a randomized range finder. The rank of
/// each block is bounded by l times the number of dofs on which the two
/// realizations differ, so the sketch is exact up to rounding.
std::vector<BlockSingularValues> resolvent_difference_singular_values(const Realization& r1,
                                                                      const Realization& r2,
                                                                      Complex z, int l,
                                                                      unsigned seed = 20240611);

struct SingularValueList {
  std::vector<double> values;  // descending
  std::string source;
  std::optional<Complex> z;
  int power = 1;
  bool multiplicity_expanded = false;
  Index expanded_dimension = 0;
};

/// Largest value of each block, repeated `multiplicity` times when `expand` is set.
SingularValueList leading_block_values(const std::vector<BlockSingularValues>& blocks, bool expand);
/// Every value of a dense matrix.
SingularValueList all_singular_values(const MatrixXc& m);

enum class SchattenClass { general, dirichlet_bounded, elliptic };

const char* to_string(SchattenClass c);
SchattenClass schatten_class_from_string(const std::string& name);

/// Exact Schatten index p = numerator / denominator.
struct SchattenIndex {
  long numerator = 1;
  long denominator = 1;

  double p() const { return double(numerator) / double(denominator); }
  /// Decay rate 1/p of s_j = O(j^{-1/p}).
  double exponent() const { return double(denominator) / double(numerator); }
};

SchattenIndex predicted_schatten_exponent(int n, int m, int l, SchattenClass cls);

struct DecayFit {
  double fitted_exponent = 0.0;
  double r_squared = 0.0;
  Index first = 0;  // 1-based window
  Index last = 0;
  Index points = 0;
  std::optional<SchattenIndex> predicted;
};

/// Least-squares slope of -log s_j against log j. Indices up to `drop_head`
/// and values below 1e-12 s_1 are discarded, then the last `tail_fraction`
/// of the remaining points is fitted.
DecayFit fit_decay_exponent(const SingularValueList& s, double tail_fraction, Index drop_head);
/// Same, with the head set to the first 10% of the list.
DecayFit fit_decay_exponent(const SingularValueList& s);

/// fitted >= predicted - margin.
bool schatten_verdict(const DecayFit& fit, double margin = 0.15);

}  // namespace spectriples
