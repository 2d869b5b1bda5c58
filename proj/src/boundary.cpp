#include "spectriples/boundary.hpp"

#include <cmath>

#include "spectriples/numerics.hpp"
#include "spectriples/shifted_solver.hpp"

namespace spectriples {

bool BoundaryOperator::hermitian(double tol) const { return is_hermitian(matrix, tol); }

Complex BoundaryOperator::mode_value(int mode) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].mode == mode) return matrix(static_cast<Index>(i), static_cast<Index>(i));
  throw Error(ErrorKind::invalid_value, "no boundary label with mode " + std::to_string(mode));
}

namespace {

SparseMatrixXc pick(const SparseMatrixXc& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  std::vector<Index> rp(static_cast<std::size_t>(a.rows()), -1), cp(static_cast<std::size_t>(a.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rp[static_cast<std::size_t>(rows[i])] = static_cast<Index>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) cp[static_cast<std::size_t>(cols[j])] = static_cast<Index>(j);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index c = 0; c < a.outerSize(); ++c) {
    if (cp[static_cast<std::size_t>(c)] < 0) continue;
    for (SparseMatrixXc::InnerIterator it(a, c); it; ++it)
      if (rp[static_cast<std::size_t>(it.row())] >= 0)
        t.emplace_back(rp[static_cast<std::size_t>(it.row())], cp[static_cast<std::size_t>(c)], it.value());
  }
  SparseMatrixXc out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// S - zW for one block.
SparseMatrixXc shifted_block(const ModeBlock& block, Complex z) {
  SparseMatrixXc out = block.stiffness.cast<Complex>();
  for (Index i = 0; i < block.dofs(); ++i)
    if (block.mass(i) != 0.0) out.coeffRef(i, i) -= z * block.mass(i);
  return out;
}

// Factorized interior problem of one block at spectral parameter z.
struct InteriorSolve {
  SparseMatrixXc bb, bi, ib;
  ShiftedSolver solver;

  InteriorSolve(const ModeBlock& block, const SparseMatrixXc& shifted, int mode)
      : bb(pick(shifted, block.boundary, block.boundary)),
        bi(pick(shifted, block.boundary, block.interior)),
        ib(pick(shifted, block.interior, block.boundary)),
        solver(pick(shifted, block.interior, block.interior), ErrorKind::dirichlet_eigenvalue_hit,
               "interior solve (mode " + std::to_string(mode) + ")") {}
};

VectorXc block_segment(const ModelProblem& p, std::size_t b, const VectorXc& global) {
  return global.segment(p.label_offset[b], static_cast<Index>(p.blocks[b].boundary.size()));
}

}  // namespace

BlockVectors pz_solve(const ModelProblem& p, Complex z, const VectorXc& phi) {
  if (phi.size() != p.boundary_basis_size())
    throw Error(ErrorKind::dimension_mismatch, "boundary datum has the wrong length");
  BlockVectors out;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const ModeBlock& block = p.blocks[b];
    const SparseMatrixXc shifted = shifted_block(block, z);
    const InteriorSolve interior(block, shifted, block.mode);
    const VectorXc local_phi = block_segment(p, b, phi);
    const VectorXc ui = -interior.solver.solve(VectorXc(interior.ib * local_phi));
    VectorXc u = VectorXc::Zero(block.dofs());
    for (std::size_t j = 0; j < block.boundary.size(); ++j) u(block.boundary[j]) = local_phi(static_cast<Index>(j));
    for (std::size_t j = 0; j < block.interior.size(); ++j) u(block.interior[j]) = ui(static_cast<Index>(j));
    out.blocks.push_back(std::move(u));
  }
  return out;
}

GridFunction nodal_values(const ModelProblem& p, const BlockVectors& u) {
  GridFunction out;
  for (const auto& dofs : u.blocks) {
    VectorXc values = VectorXc::Zero(p.nodes + 1);
    for (Index i = 0; i <= p.nodes; ++i) {
      const Index d = p.node_dof(i);
      if (d >= 0) values(i) = dofs(d);
    }
    out.blocks.push_back(std::move(values));
  }
  return out;
}

VectorXc conormal_trace(const ModelProblem& p, const BlockVectors& u, Complex z) {
  VectorXc out(p.boundary_basis_size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const ModeBlock& block = p.blocks[b];
    const VectorXc residual = shifted_block(block, z) * u.blocks[b];
    for (std::size_t j = 0; j < block.boundary.size(); ++j)
      out(p.label_offset[b] + static_cast<Index>(j)) = -residual(block.boundary[j]) / p.boundary_measure;
  }
  return out;
}

VectorXc dirichlet_trace(const ModelProblem& p, const BlockVectors& u) {
  VectorXc out(p.boundary_basis_size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (std::size_t j = 0; j < p.blocks[b].boundary.size(); ++j)
      out(p.label_offset[b] + static_cast<Index>(j)) = u.blocks[b](p.blocks[b].boundary[j]);
  return out;
}

BoundaryOperator calderon(const ModelProblem& p, Complex z) {
  BoundaryOperator out;
  out.labels = p.labels;
  out.z = z;
  const Index nb = p.boundary_basis_size();
  out.matrix = MatrixXc::Zero(nb, nb);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const ModeBlock& block = p.blocks[b];
    const InteriorSolve interior(block, shifted_block(block, z), block.mode);
    const MatrixXc x = interior.solver.solve(MatrixXc(interior.ib));
    const MatrixXc schur = MatrixXc(interior.bb) - interior.bi * x;
    const auto size = static_cast<Index>(block.boundary.size());
    out.matrix.block(p.label_offset[b], p.label_offset[b], size, size) = -schur / p.boundary_measure;
  }
  return out;
}

BoundaryOperator smoothing_operator(const ModelProblem& p, SmoothingSide side) {
  BoundaryOperator out;
  out.labels = p.labels;
  const Index nb = p.boundary_basis_size();
  out.matrix = MatrixXc::Zero(nb, nb);
  for (Index i = 0; i < nb; ++i) {
    const BoundaryLabel& label = p.labels[static_cast<std::size_t>(i)];
    const double order_b = label.trace_order;              // m_j
    const double order_c = 2.0 * p.m - 1.0 - order_b;      // mu_j
    const double exponent =
        side == SmoothingSide::m_side ? order_b / 2.0 + 0.25 : p.m - order_c / 2.0 - 0.25;
    out.matrix(i, i) = std::pow(p.laplace_beltrami(label) + 1.0, exponent);
  }
  return out;
}

BoundaryOperator t_operator(const ModelProblem& p, Complex z) {
  BoundaryOperator out = calderon(p, z);
  out.matrix -= calderon(p, 0.0).matrix;
  return out;
}

BoundaryOperator weyl_function(const ModelProblem& p, Complex z) {
  const BoundaryOperator t = t_operator(p, z);
  BoundaryOperator out;
  out.labels = p.labels;
  out.z = z;
  out.matrix = smoothing_operator(p, SmoothingSide::mu_side).matrix * t.matrix *
               smoothing_operator(p, SmoothingSide::m_side).matrix;
  return out;
}

TraceMaps trace_maps(const ModelProblem& p, const BlockVectors& u, Complex z,
                     const BoundaryOperator& lambda0) {
  const VectorXc b = dirichlet_trace(p, u);
  const VectorXc c = conormal_trace(p, u, z);
  const MatrixXc dm = smoothing_operator(p, SmoothingSide::m_side).matrix;
  const MatrixXc dmu = smoothing_operator(p, SmoothingSide::mu_side).matrix;
  TraceMaps out;
  out.gamma0 = dm.diagonal().cwiseInverse().asDiagonal() * b;
  out.gamma1 = dmu * (c - lambda0.matrix * b);
  return out;
}

double operator_scale(const ModelProblem& p) {
  double best = 0.0;
  for (const auto& block : p.blocks) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(block.dofs());
    for (Index c = 0; c < block.stiffness.outerSize(); ++c)
      for (SparseMatrixXd::InnerIterator it(block.stiffness, c); it; ++it) {
        const double mr = block.mass(it.row()), mc = block.mass(it.col());
        if (mr > 0.0 && mc > 0.0) rows(it.row()) += std::abs(it.value()) / std::sqrt(mr * mc);
      }
    best = std::max(best, rows.maxCoeff());
  }
  return best;
}

GridFunction sample(const ModelProblem& p, const std::function<Complex(double)>& f) {
  const Eigen::VectorXd x = p.grid();
  VectorXc values(x.size());
  for (Index i = 0; i < x.size(); ++i) values(i) = f(x(i));
  GridFunction out;
  out.blocks.assign(p.blocks.size(), values);
  return out;
}

}  // namespace spectriples
