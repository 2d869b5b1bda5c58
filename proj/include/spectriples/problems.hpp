#pragma once

// Discretized model elliptic problems.
//
// Every problem is a list of mode blocks (one per Fourier index or spherical
// degree; a single block in 1D). A block carries a symmetric stiffness matrix
// S and a diagonal mass W over its degrees of freedom, split into trace dofs
// (the Dirichlet system B) and the rest. The quadratic form of S is the
// discrete energy a(u,u), and the discrete conormal trace of a solution of
// (A - z)u = 0 is -[(S - zW)u]_b / rho, with rho the boundary measure. With
// that convention the Calderon operator is exactly minus the Schur complement
// of S - zW onto the trace dofs, and Robin-type realizations are S + rho*K.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spectriples/potential.hpp"
#include "spectriples/types.hpp"

namespace spectriples {

enum class ProblemKind { interval_m1, halfline_m1, interval_m2, annulus_m1, ball_exterior_m1 };

const char* to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

/// One basis vector of the boundary space.
struct BoundaryLabel {
  int mode = 0;          // Fourier index (circle), degree (sphere), 0 in 1D
  int point = 0;         // boundary point (1D), 0 otherwise
  int trace_order = 0;   // j of gamma_j
  int multiplicity = 1;  // 2l+1 on the sphere
  bool operator==(const BoundaryLabel&) const = default;
};

struct ModeBlock {
  int mode = 0;
  int multiplicity = 1;
  SparseMatrixXd stiffness;
  Eigen::VectorXd mass;            // zero on massless trace dofs
  std::vector<Index> boundary;     // trace dofs, in label order
  std::vector<Index> interior;     // complement of `boundary`
  double centrifugal = 0.0;        // k^2 or l(l+1)
  std::vector<Index> field_index;  // local dof -> global field index, -1 when massless

  Index dofs() const { return stiffness.rows(); }
};

struct ModelProblem {
  ProblemKind kind = ProblemKind::interval_m1;
  int n = 1;  // ambient dimension
  int m = 1;  // half-order
  Index nodes = 0;       // N: grid has nodes 0..N
  double h = 0.0;
  double start = 0.0;    // first grid coordinate (0 or r_inner)
  double end = 0.0;      // last grid coordinate (L, r_outer, R)
  double boundary_measure = 1.0;
  bool truncated = false;  // Dirichlet closure at `end` outside the boundary space
  Potential potential;
  std::vector<ModeBlock> blocks;
  std::vector<BoundaryLabel> labels;
  std::vector<Index> label_offset;  // first label of each block
  Index field_dimension = 0;        // total massed dofs

  Eigen::VectorXd grid() const;
  double weight(double r) const;  // radial weight 1, r or r^2
  /// Sum of label multiplicities.
  Index boundary_dimension() const;
  Index boundary_basis_size() const { return static_cast<Index>(labels.size()); }
  /// Index of the block holding a mode label, or -1.
  Index block_of_mode(int mode) const;
  /// Eigenvalue of the (unshifted) Laplace-Beltrami operator for a label.
  double laplace_beltrami(const BoundaryLabel& label) const;
  /// Local dof of a grid node in block `b`, -1 for a node fixed to zero.
  Index node_dof(Index node) const;
};

ModelProblem build_interval_m1(double length, Index nodes, const Potential& q);
ModelProblem build_halfline_m1(double truncation, Index nodes, const Potential& q);
ModelProblem build_interval_m2(double length, Index nodes, const Potential& q);
ModelProblem build_annulus_m1(double r_inner, double r_outer, Index nodes, int k_max,
                              const Potential& q);
ModelProblem build_ball_exterior_m1(double r_inner, double truncation, Index nodes, int l_max,
                                    const Potential& q);

/// Boundary operator K of the condition Cu = KBu.
struct KSpec {
  enum class Kind { scalar, mode_multiplier, dense, angular };

  Kind kind = Kind::scalar;
  Complex scalar{0.0, 0.0};
  std::function<Complex(int)> multiplier;
  std::string multiplier_name;
  MatrixXc dense;
  std::vector<Complex> angular_samples;  // sigma(2*pi*j/M), j = 0..M-1

  static KSpec constant(Complex sigma);
  static KSpec mode_multiplier(std::function<Complex(int)> f, std::string name);
  static KSpec dense_matrix(MatrixXc k);
  static KSpec angular_function(std::vector<Complex> samples);

  std::string describe() const;
};

/// Matrix of K in the boundary basis of `p`.
MatrixXc k_matrix(const ModelProblem& p, const KSpec& k);

enum class ConditionKind { dirichlet, robin };

struct RealizationBlock {
  std::vector<Index> source_blocks;
  int multiplicity = 1;
  SparseMatrixXc matrix;    // W^{-1/2} A W^{-1/2} on `dofs`
  std::vector<Index> dofs;  // global field indices
};

struct Realization {
  ConditionKind condition = ConditionKind::dirichlet;
  ProblemKind kind = ProblemKind::interval_m1;
  int n = 1;
  int m = 1;
  Index field_dimension = 0;
  std::vector<RealizationBlock> blocks;
  MatrixXc k;  // empty for Dirichlet
  bool hermitian = true;
  std::string description;

  Index dimension() const;
  bool mode_diagonal() const;
  /// Largest relative asymmetry over the blocks.
  double asymmetry() const;
  /// All blocks assembled on the global field space (small problems only).
  MatrixXc dense() const;
};

/// A_0: every trace of the Dirichlet system set to zero.
Realization dirichlet_realization(const ModelProblem& p);
/// A_K: Cu = KBu. K = 0 gives the realization with Cu = 0.
Realization realization_with_k(const ModelProblem& p, const KSpec& k);
Realization realization_with_k(const ModelProblem& p, const MatrixXc& k, std::string description);

struct SpectrumList {
  bool hermitian = true;
  Eigen::VectorXd values;              // ascending (Hermitian path)
  std::vector<Complex> complex_values;  // general path, sorted by real part
  std::vector<Index> multiplicity;      // parallel to whichever list is filled
  std::string source;

  Index count() const;
  /// Eigenvalues with multiplicity expanded (Hermitian path).
  std::vector<double> expanded() const;
};

SpectrumList spectrum(const Realization& r,
                      std::optional<std::pair<double, double>> window = std::nullopt);

}  // namespace spectriples
