#include <algorithm>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "spectriples/numerics.hpp"
#include "spectriples/problems.hpp"

namespace spectriples {

namespace {

// Rows/cols of `a` restricted to the given index lists (in list order).
SparseMatrixXc submatrix(const SparseMatrixXc& a, const std::vector<Index>& rows,
                         const std::vector<Index>& cols) {
  std::vector<Index> row_pos(static_cast<std::size_t>(a.rows()), -1);
  std::vector<Index> col_pos(static_cast<std::size_t>(a.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[static_cast<std::size_t>(rows[i])] = static_cast<Index>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<Index>(j);
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Index c = 0; c < a.outerSize(); ++c) {
    const Index cj = col_pos[static_cast<std::size_t>(c)];
    if (cj < 0) continue;
    for (SparseMatrixXc::InnerIterator it(a, c); it; ++it) {
      const Index ri = row_pos[static_cast<std::size_t>(it.row())];
      if (ri >= 0) triplets.emplace_back(ri, cj, it.value());
    }
  }
  SparseMatrixXc out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrixXc scale_by_mass(const SparseMatrixXc& a, const Eigen::VectorXd& mass) {
  const Eigen::VectorXd s = mass.cwiseSqrt().cwiseInverse();
  SparseMatrixXc out = a;
  for (Index c = 0; c < out.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(out, c); it; ++it) it.valueRef() *= s(it.row()) * s(it.col());
  return out;
}

double sparse_asymmetry(const SparseMatrixXc& a) {
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  const SparseMatrixXc adj = a.adjoint();
  return SparseMatrixXc(a - adj).norm() / scale;
}

// Connected components of the block graph induced by off-diagonal couplings of K.
std::vector<std::vector<Index>> coupled_components(const ModelProblem& p, const MatrixXc& k) {
  const auto nblocks = static_cast<Index>(p.blocks.size());
  std::vector<Index> parent(static_cast<std::size_t>(nblocks));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  std::vector<Index> label_block(static_cast<std::size_t>(p.boundary_basis_size()));
  for (Index b = 0; b < nblocks; ++b)
    for (std::size_t j = 0; j < p.blocks[static_cast<std::size_t>(b)].boundary.size(); ++j)
      label_block[static_cast<std::size_t>(p.label_offset[static_cast<std::size_t>(b)]) + j] = b;
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = 0; j < k.cols(); ++j) {
      if (k(i, j) == Complex(0.0, 0.0)) continue;
      const Index a = find(label_block[static_cast<std::size_t>(i)]);
      const Index b = find(label_block[static_cast<std::size_t>(j)]);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  std::map<Index, std::vector<Index>> groups;
  for (Index b = 0; b < nblocks; ++b) groups[find(b)].push_back(b);
  std::vector<std::vector<Index>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  return out;
}

}  // namespace

Index Realization::dimension() const {
  Index total = 0;
  for (const auto& b : blocks) total += b.matrix.rows() * b.multiplicity;
  return total;
}

bool Realization::mode_diagonal() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const RealizationBlock& b) { return b.source_blocks.size() == 1; });
}

double Realization::asymmetry() const {
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::max(worst, sparse_asymmetry(b.matrix));
  return worst;
}

MatrixXc Realization::dense() const {
  MatrixXc out = MatrixXc::Zero(field_dimension, field_dimension);
  for (const auto& b : blocks)
    for (Index c = 0; c < b.matrix.outerSize(); ++c)
      for (SparseMatrixXc::InnerIterator it(b.matrix, c); it; ++it)
        out(b.dofs[static_cast<std::size_t>(it.row())], b.dofs[static_cast<std::size_t>(it.col())]) =
            it.value();
  return out;
}

Realization dirichlet_realization(const ModelProblem& p) {
  Realization r;
  r.condition = ConditionKind::dirichlet;
  r.kind = p.kind;
  r.n = p.n;
  r.m = p.m;
  r.field_dimension = p.field_dimension;
  r.description = "dirichlet";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const ModeBlock& block = p.blocks[b];
    const SparseMatrixXc s = block.stiffness.cast<Complex>();
    Eigen::VectorXd mass(static_cast<Index>(block.interior.size()));
    RealizationBlock out;
    out.source_blocks = {static_cast<Index>(b)};
    out.multiplicity = block.multiplicity;
    for (std::size_t i = 0; i < block.interior.size(); ++i) {
      mass(static_cast<Index>(i)) = block.mass(block.interior[i]);
      out.dofs.push_back(block.field_index[static_cast<std::size_t>(block.interior[i])]);
    }
    out.matrix = scale_by_mass(submatrix(s, block.interior, block.interior), mass);
    r.blocks.push_back(std::move(out));
  }
  r.hermitian = true;
  return r;
}

Realization realization_with_k(const ModelProblem& p, const KSpec& k) {
  return realization_with_k(p, k_matrix(p, k), k.describe());
}

Realization realization_with_k(const ModelProblem& p, const MatrixXc& k, std::string description) {
  const Index nb = p.boundary_basis_size();
  if (k.rows() != nb || k.cols() != nb)
    throw Error(ErrorKind::dimension_mismatch,
                "K has shape " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                    " but the boundary space has dimension " + std::to_string(nb));
  if (!k.allFinite()) throw Error(ErrorKind::invalid_config, "K has non-finite entries");

  Realization r;
  r.condition = ConditionKind::robin;
  r.kind = p.kind;
  r.n = p.n;
  r.m = p.m;
  r.field_dimension = p.field_dimension;
  r.k = k;
  r.hermitian = is_hermitian(k);
  r.description = std::move(description);

  for (const auto& component : coupled_components(p, k)) {
    // Assemble the component's stiffness on concatenated local dofs.
    std::vector<Index> dof_offset;
    Index total = 0;
    int multiplicity = p.blocks[static_cast<std::size_t>(component.front())].multiplicity;
    for (Index b : component) {
      const auto& block = p.blocks[static_cast<std::size_t>(b)];
      if (block.multiplicity != multiplicity)
        throw Error(ErrorKind::invalid_config, "K couples modes of different multiplicity");
      dof_offset.push_back(total);
      total += block.dofs();
    }
    std::vector<Eigen::Triplet<Complex>> triplets;
    Eigen::VectorXd mass(total);
    std::vector<Index> field(static_cast<std::size_t>(total));
    std::vector<Index> boundary_dof;  // component-local dof for each component label
    std::vector<Index> boundary_label;
    for (std::size_t c = 0; c < component.size(); ++c) {
      const auto b = static_cast<std::size_t>(component[c]);
      const auto& block = p.blocks[b];
      const Index off = dof_offset[c];
      for (Index col = 0; col < block.stiffness.outerSize(); ++col)
        for (SparseMatrixXd::InnerIterator it(block.stiffness, col); it; ++it)
          triplets.emplace_back(off + it.row(), off + it.col(), Complex(it.value(), 0.0));
      mass.segment(off, block.dofs()) = block.mass;
      for (Index i = 0; i < block.dofs(); ++i) field[static_cast<std::size_t>(off + i)] = block.field_index[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < block.boundary.size(); ++j) {
        boundary_dof.push_back(off + block.boundary[j]);
        boundary_label.push_back(p.label_offset[b] + static_cast<Index>(j));
      }
    }
    for (std::size_t a = 0; a < boundary_dof.size(); ++a)
      for (std::size_t b = 0; b < boundary_dof.size(); ++b) {
        const Complex v = k(boundary_label[a], boundary_label[b]);
        if (v != Complex(0.0, 0.0))
          triplets.emplace_back(boundary_dof[a], boundary_dof[b], p.boundary_measure * v);
      }
    SparseMatrixXc s(total, total);
    s.setFromTriplets(triplets.begin(), triplets.end());

    std::vector<Index> massed, massless;
    for (Index i = 0; i < total; ++i) (mass(i) > 0.0 ? massed : massless).push_back(i);

    SparseMatrixXc reduced = submatrix(s, massed, massed);
    if (!massless.empty()) {
      // Trace dofs without mass are condensed out: S_FF - S_FT S_TT^{-1} S_TF.
      const MatrixXc stt = MatrixXc(submatrix(s, massless, massless));
      const MatrixXc stf = MatrixXc(submatrix(s, massless, massed));
      const SparseMatrixXc sft = submatrix(s, massed, massless);
      const MatrixXc x = solve_linear(stt, stf);
      const SparseMatrixXc xs = x.sparseView(0.0, 0.0);
      const SparseMatrixXc correction = sft * xs;
      reduced = reduced - correction;
    }
    Eigen::VectorXd reduced_mass(static_cast<Index>(massed.size()));
    RealizationBlock out;
    for (std::size_t i = 0; i < massed.size(); ++i) {
      reduced_mass(static_cast<Index>(i)) = mass(massed[i]);
      out.dofs.push_back(field[static_cast<std::size_t>(massed[i])]);
    }
    out.matrix = scale_by_mass(reduced, reduced_mass);
    out.matrix.prune(Complex(0.0, 0.0));
    out.source_blocks = component;
    out.multiplicity = multiplicity;
    r.blocks.push_back(std::move(out));
  }
  return r;
}

Index SpectrumList::count() const {
  return std::accumulate(multiplicity.begin(), multiplicity.end(), Index{0});
}

std::vector<double> SpectrumList::expanded() const {
  std::vector<double> out;
  for (Index i = 0; i < values.size(); ++i)
    out.insert(out.end(), static_cast<std::size_t>(multiplicity[static_cast<std::size_t>(i)]), values(i));
  return out;
}

namespace {

bool real_tridiagonal(const SparseMatrixXc& a) {
  for (Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(a, c); it; ++it)
      if (std::abs(it.row() - it.col()) > 1 || it.value().imag() != 0.0) return false;
  return true;
}

Eigen::VectorXd hermitian_block_eigenvalues(const SparseMatrixXc& a) {
  const Index n = a.rows();
  if (n == 0) return {};
  if (real_tridiagonal(a)) {
    Eigen::VectorXd diag(n), sub(std::max<Index>(n - 1, 0));
    for (Index i = 0; i < n; ++i) diag(i) = a.coeff(i, i).real();
    for (Index i = 0; i + 1 < n; ++i) sub(i) = 0.5 * (a.coeff(i + 1, i).real() + a.coeff(i, i + 1).real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }
  const MatrixXc dense(a);
  if (dense.imag().cwiseAbs().maxCoeff() == 0.0) return hermitian_eigenvalues(Eigen::MatrixXd(dense.real()));
  return hermitian_eigenvalues(dense);
}

}  // namespace

SpectrumList spectrum(const Realization& r, std::optional<std::pair<double, double>> window) {
  SpectrumList out;
  out.hermitian = r.hermitian;
  out.source = r.description;
  auto inside = [&](double x) { return !window || (x > window->first && x < window->second); };

  if (r.hermitian) {
    std::vector<std::pair<double, Index>> all;
    for (const auto& b : r.blocks) {
      const Eigen::VectorXd values = hermitian_block_eigenvalues(b.matrix);
      for (double v : values)
        if (inside(v)) all.emplace_back(v, b.multiplicity);
    }
    std::sort(all.begin(), all.end());
    out.values.resize(static_cast<Index>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) {
      out.values(static_cast<Index>(i)) = all[i].first;
      out.multiplicity.push_back(all[i].second);
    }
    return out;
  }

  std::vector<std::pair<Complex, Index>> all;
  for (const auto& b : r.blocks) {
    if (b.matrix.rows() == 0) continue;
    Eigen::ComplexEigenSolver<MatrixXc> solver(MatrixXc(b.matrix), false);
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
      const Complex v = solver.eigenvalues()(i);
      if (inside(v.real())) all.emplace_back(v, b.multiplicity);
    }
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first.real() != b.first.real() ? a.first.real() < b.first.real() : a.first.imag() < b.first.imag();
  });
  for (const auto& [v, mult] : all) {
    out.complex_values.push_back(v);
    out.multiplicity.push_back(mult);
  }
  return out;
}

}  // namespace spectriples
