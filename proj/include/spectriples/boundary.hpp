#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spectriples/problems.hpp"

namespace spectriples {

/// Operator on the boundary space of a ModelProblem (mode or (point, j) basis).
struct BoundaryOperator {
  MatrixXc matrix;
  std::vector<BoundaryLabel> labels;
  std::optional<Complex> z;

  Index size() const { return matrix.rows(); }
  bool hermitian(double tol = 1e-8) const;
  /// Entry on the diagonal for a mode label (first label carrying the mode).
  Complex mode_value(int mode) const;
};

/// Per-block dof vectors, in the local dof numbering of each ModeBlock.
struct BlockVectors {
  std::vector<VectorXc> blocks;
};

/// Nodal samples per block (grid nodes 0..N).
struct GridFunction {
  std::vector<VectorXc> blocks;
};

/// P(z)phi: the solution of (A - z)u = 0 in the interior with Bu = phi.
BlockVectors pz_solve(const ModelProblem& p, Complex z, const VectorXc& phi);
GridFunction nodal_values(const ModelProblem& p, const BlockVectors& u);

/// Conormal trace of the scheme for a function solving (A - z)u = 0 at interior dofs.
VectorXc conormal_trace(const ModelProblem& p, const BlockVectors& u, Complex z);
VectorXc dirichlet_trace(const ModelProblem& p, const BlockVectors& u);

/// Lambda(z) phi = C P(z) phi.
BoundaryOperator calderon(const ModelProblem& p, Complex z);

enum class SmoothingSide { m_side, mu_side };
BoundaryOperator smoothing_operator(const ModelProblem& p, SmoothingSide side);

/// T(z) = Lambda(z) - Lambda(0).
BoundaryOperator t_operator(const ModelProblem& p, Complex z);
/// M(z) = Delta_mu (Lambda(z) - Lambda(0)) Delta_m.
BoundaryOperator weyl_function(const ModelProblem& p, Complex z);

struct TraceMaps {
  VectorXc gamma0;  // Delta_m^{-1} B u
  VectorXc gamma1;  // Delta_mu (C u - Lambda(0) B u)
};

/// Regularized trace maps of a solution of (A - z)u = 0.
TraceMaps trace_maps(const ModelProblem& p, const BlockVectors& u, Complex z,
                     const BoundaryOperator& lambda0);

struct GreenResidual {
  double residual = 0.0;
  double scale = 0.0;  // ||u|| ||v|| ||A||
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// |(A_max u, v) - (u, A_max v) - [(G1 u, G0 v) - (G0 u, G1 v)]| for nodal samples,
/// with A_max and the traces realized by interior and one-sided stencils.
GreenResidual green_residual(const ModelProblem& p, const GridFunction& u, const GridFunction& v);
GreenResidual green_residual(const ModelProblem& p, const GridFunction& u, const GridFunction& v,
                             const BoundaryOperator& lambda0);

/// Row-sum bound on the norm of the Dirichlet realization.
double operator_scale(const ModelProblem& p);

/// Sample f(x) on every block's grid (the same function in each mode).
GridFunction sample(const ModelProblem& p, const std::function<Complex(double)>& f);

}  // namespace spectriples
