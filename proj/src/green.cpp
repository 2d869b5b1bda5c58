// Discrete Green identity check with stencil-based A_max and traces.

#include <cmath>

#include "spectriples/boundary.hpp"
#include "spectriples/stencils.hpp"

namespace spectriples {

namespace {

// Derivative of order `order` at grid node `at`, one-sided with order+2 points
// taken towards the interior.
Complex one_sided(const VectorXc& u, Index at, int order, double h, bool forward) {
  const Index count = order + 2;
  Eigen::VectorXd x(count);
  for (Index k = 0; k < count; ++k) x(k) = (forward ? double(k) : -double(k)) * h;
  const Eigen::VectorXd w = fd_weights(0.0, x, order);
  Complex acc{0.0, 0.0};
  for (Index k = 0; k < count; ++k) acc += w(k) * u(forward ? at + k : at - k);
  return acc;
}

// Derivative of order `order` at node `at` from the six nodes starting at `first`.
Complex offset_stencil(const VectorXc& u, Index at, Index first, int order, double h) {
  Eigen::VectorXd x(6);
  for (Index k = 0; k < 6; ++k) x(k) = double(first + k - at) * h;
  const Eigen::VectorXd w = fd_weights(0.0, x, order);
  Complex acc{0.0, 0.0};
  for (Index k = 0; k < 6; ++k) acc += w(k) * u(first + k);
  return acc;
}

double log_weight_derivative(const ModelProblem& p, double r) {
  switch (p.kind) {
    case ProblemKind::annulus_m1: return 1.0 / r;
    case ProblemKind::ball_exterior_m1: return 2.0 / r;
    default: return 0.0;
  }
}

VectorXc apply_second_order(const ModelProblem& p, const ModeBlock& block, const VectorXc& u) {
  const Index N = p.nodes;
  const double h = p.h;
  const Eigen::VectorXd r = p.grid();
  VectorXc out(N + 1);
  auto potential = [&](Index i) {
    return p.potential(r(i)) + (block.centrifugal != 0.0 ? block.centrifugal / (r(i) * r(i)) : 0.0);
  };
  for (Index i = 1; i < N; ++i) {
    const double wl = p.weight(r(i) - h / 2.0), wr = p.weight(r(i) + h / 2.0);
    out(i) = -(wr * (u(i + 1) - u(i)) - wl * (u(i) - u(i - 1))) / (p.weight(r(i)) * h * h) + potential(i) * u(i);
  }
  for (Index i : {Index{0}, N}) {
    const bool forward = i == 0;
    const Complex d1 = one_sided(u, i, 1, h, forward);
    const Complex d2 = one_sided(u, i, 2, h, forward);
    out(i) = -(d2 + log_weight_derivative(p, r(i)) * d1) + potential(i) * u(i);
  }
  return out;
}

VectorXc apply_fourth_order(const ModelProblem& p, const VectorXc& u) {
  const Index N = p.nodes;
  const double h = p.h;
  const Eigen::VectorXd x = p.grid();
  VectorXc out(N + 1);
  const double h4 = h * h * h * h;
  for (Index i = 2; i + 2 <= N; ++i)
    out(i) = (u(i - 2) - 4.0 * u(i - 1) + 6.0 * u(i) - 4.0 * u(i + 1) + u(i + 2)) / h4;
  for (Index i : {Index{0}, Index{1}}) out(i) = offset_stencil(u, i, 0, 4, h);
  for (Index i : {N - 1, N}) out(i) = offset_stencil(u, i, N - 5, 4, h);
  for (Index i = 0; i <= N; ++i) out(i) += p.potential(x(i)) * u(i);
  return out;
}

struct Traces {
  VectorXc b, c;
};

Traces stencil_traces(const ModelProblem& p, const GridFunction& u) {
  Traces t{VectorXc::Zero(p.boundary_basis_size()), VectorXc::Zero(p.boundary_basis_size())};
  for (std::size_t blk = 0; blk < p.blocks.size(); ++blk) {
    const VectorXc& values = u.blocks[blk];
    for (std::size_t j = 0; j < p.blocks[blk].boundary.size(); ++j) {
      const Index idx = p.label_offset[blk] + static_cast<Index>(j);
      const BoundaryLabel& label = p.labels[static_cast<std::size_t>(idx)];
      const bool left = label.point == 0;
      const Index node = left ? 0 : p.nodes;
      const double s = left ? 1.0 : -1.0;  // d/dn = s d/dx
      auto dn = [&](int k) { return std::pow(s, k) * one_sided(values, node, k, p.h, left); };
      if (p.m == 1) {
        t.b(idx) = values(node);
        t.c(idx) = dn(1);
      } else if (label.trace_order == 0) {
        t.b(idx) = values(node);
        t.c(idx) = -dn(3);
      } else {
        t.b(idx) = dn(1);
        t.c(idx) = dn(2);
      }
    }
  }
  return t;
}

}  // namespace

GreenResidual green_residual(const ModelProblem& p, const GridFunction& u, const GridFunction& v) {
  return green_residual(p, u, v, calderon(p, 0.0));
}

GreenResidual green_residual(const ModelProblem& p, const GridFunction& u, const GridFunction& v,
                             const BoundaryOperator& lambda0) {
  if (u.blocks.size() != p.blocks.size() || v.blocks.size() != p.blocks.size())
    throw Error(ErrorKind::dimension_mismatch, "grid functions do not match the problem's blocks");
  const Index N = p.nodes;
  const Eigen::VectorXd r = p.grid();
  Complex field{0.0, 0.0};
  double norm_u = 0.0, norm_v = 0.0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const ModeBlock& block = p.blocks[b];
    const VectorXc& ub = u.blocks[b];
    const VectorXc& vb = v.blocks[b];
    if (ub.size() != N + 1 || vb.size() != N + 1)
      throw Error(ErrorKind::dimension_mismatch, "grid function has the wrong number of nodes");
    const VectorXc au = p.m == 1 ? apply_second_order(p, block, ub) : apply_fourth_order(p, ub);
    const VectorXc av = p.m == 1 ? apply_second_order(p, block, vb) : apply_fourth_order(p, vb);
    Complex acc{0.0, 0.0};
    for (Index i = 0; i <= N; ++i) {
      const double w = ((i == 0 || i == N) ? p.h / 2.0 : p.h) * p.weight(r(i));
      acc += w * (au(i) * std::conj(vb(i)) - ub(i) * std::conj(av(i)));
      norm_u += block.multiplicity * w * std::norm(ub(i));
      norm_v += block.multiplicity * w * std::norm(vb(i));
    }
    field += double(block.multiplicity) * acc;
  }

  const Traces tu = stencil_traces(p, u);
  const Traces tv = stencil_traces(p, v);
  const Eigen::VectorXcd dm = smoothing_operator(p, SmoothingSide::m_side).matrix.diagonal();
  const MatrixXc dmu = smoothing_operator(p, SmoothingSide::mu_side).matrix;
  const VectorXc g0u = dm.cwiseInverse().asDiagonal() * tu.b;
  const VectorXc g0v = dm.cwiseInverse().asDiagonal() * tv.b;
  const VectorXc g1u = dmu * (tu.c - lambda0.matrix * tu.b);
  const VectorXc g1v = dmu * (tv.c - lambda0.matrix * tv.b);
  Complex boundary{0.0, 0.0};
  for (Index i = 0; i < p.boundary_basis_size(); ++i) {
    const double mult = p.labels[static_cast<std::size_t>(i)].multiplicity;
    boundary += mult * (g1u(i) * std::conj(g0v(i)) - g0u(i) * std::conj(g1v(i)));
  }
  boundary *= p.boundary_measure;

  GreenResidual out;
  out.residual = std::abs(field - boundary);
  out.scale = std::sqrt(norm_u) * std::sqrt(norm_v) * operator_scale(p);
  return out;
}

}  // namespace spectriples
