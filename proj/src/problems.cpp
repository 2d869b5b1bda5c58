#include "spectriples/problems.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace spectriples {

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::interval_m1: return "interval_m1";
    case ProblemKind::halfline_m1: return "halfline_m1";
    case ProblemKind::interval_m2: return "interval_m2";
    case ProblemKind::annulus_m1: return "annulus_m1";
    case ProblemKind::ball_exterior_m1: return "ball_exterior_m1";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  for (auto kind : {ProblemKind::interval_m1, ProblemKind::halfline_m1, ProblemKind::interval_m2,
                    ProblemKind::annulus_m1, ProblemKind::ball_exterior_m1})
    if (name == to_string(kind)) return kind;
  throw Error(ErrorKind::invalid_value, "unknown problem kind '" + name + "'");
}

Eigen::VectorXd ModelProblem::grid() const {
  return Eigen::VectorXd::LinSpaced(nodes + 1, start, end);
}

double ModelProblem::weight(double r) const {
  switch (kind) {
    case ProblemKind::annulus_m1: return r;
    case ProblemKind::ball_exterior_m1: return r * r;
    default: return 1.0;
  }
}

Index ModelProblem::boundary_dimension() const {
  Index total = 0;
  for (const auto& label : labels) total += label.multiplicity;
  return total;
}

Index ModelProblem::block_of_mode(int mode) const {
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (blocks[b].mode == mode) return static_cast<Index>(b);
  return -1;
}

double ModelProblem::laplace_beltrami(const BoundaryLabel& label) const {
  const double r = start;
  switch (kind) {
    case ProblemKind::annulus_m1: return double(label.mode) * label.mode / (r * r);
    case ProblemKind::ball_exterior_m1: return double(label.mode) * (label.mode + 1) / (r * r);
    default: return 0.0;
  }
}

Index ModelProblem::node_dof(Index node) const {
  if (node < 0 || node > nodes) return -1;
  if (truncated && node == nodes) return -1;
  return node;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::invalid_config, message);
}

// Trapezoid weight of grid node i.
double trapezoid(Index i, Index nodes, double h) { return (i == 0 || i == nodes) ? h / 2.0 : h; }

// Second-order flux-form discretization of -(1/w)(w u')' + (q + c/r^2) u in the
// weighted energy form. Nodes 0..N; node N is dropped when `truncated`.
ModeBlock second_order_block(const ModelProblem& p, int mode, int multiplicity, double centrifugal) {
  ModeBlock block;
  block.mode = mode;
  block.multiplicity = multiplicity;
  block.centrifugal = centrifugal;
  const Index N = p.nodes;
  const Index dofs = p.truncated ? N : N + 1;
  const Eigen::VectorXd r = p.grid();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * N + dofs));
  for (Index i = 0; i < N; ++i) {
    const double c = p.weight(r(i) + p.h / 2.0) / p.h;
    const bool right_live = i + 1 < dofs;
    triplets.emplace_back(i, i, c);
    if (right_live) {
      triplets.emplace_back(i + 1, i + 1, c);
      triplets.emplace_back(i, i + 1, -c);
      triplets.emplace_back(i + 1, i, -c);
    }
  }
  block.mass.resize(dofs);
  for (Index i = 0; i < dofs; ++i) {
    const double w = trapezoid(i, N, p.h) * p.weight(r(i));
    double potential = p.potential(r(i));
    if (centrifugal != 0.0) potential += centrifugal / (r(i) * r(i));
    triplets.emplace_back(i, i, w * potential);
    block.mass(i) = w;
  }
  block.stiffness.resize(dofs, dofs);
  block.stiffness.setFromTriplets(triplets.begin(), triplets.end());

  block.boundary.push_back(0);
  if (!p.truncated) block.boundary.push_back(N);
  for (Index i = 1; i < dofs; ++i)
    if (p.truncated || i != N) block.interior.push_back(i);
  return block;
}

// Fourth-order operator u'''' + q u through the energy sum_i w_i |D2 u_i|^2 + w_i q_i |u_i|^2.
// Dofs 0..N hold nodal values; dof N+1 and N+2 hold the interior-normal
// derivatives at the two ends, which fix the ghost values
//   u_{-1} = u_1 - 2h d_0,   u_{N+1} = u_{N-1} - 2h d_N.
ModeBlock fourth_order_block(const ModelProblem& p) {
  ModeBlock block;
  const Index N = p.nodes;
  const Index dofs = N + 3;
  const Index d0 = N + 1;
  const Index dN = N + 2;
  const double h = p.h;
  const Eigen::VectorXd x = p.grid();

  std::vector<Eigen::Triplet<double>> rows;
  for (Index i = 0; i <= N; ++i) {
    const double s = 1.0 / (h * h);
    auto add = [&](Index dof, double v) { rows.emplace_back(i, dof, v * s); };
    // left neighbour
    if (i == 0) {
      add(1, 1.0);
      add(d0, -2.0 * h);
    } else {
      add(i - 1, 1.0);
    }
    add(i, -2.0);
    if (i == N) {
      add(N - 1, 1.0);
      add(dN, -2.0 * h);
    } else {
      add(i + 1, 1.0);
    }
  }
  SparseMatrixXd d2(N + 1, dofs);
  d2.setFromTriplets(rows.begin(), rows.end());

  Eigen::VectorXd w(N + 1);
  for (Index i = 0; i <= N; ++i) w(i) = trapezoid(i, N, h);
  SparseMatrixXd energy = SparseMatrixXd(d2.transpose()) * w.asDiagonal() * d2;

  std::vector<Eigen::Triplet<double>> potential;
  for (Index i = 0; i <= N; ++i) potential.emplace_back(i, i, w(i) * p.potential(x(i)));
  SparseMatrixXd zeroth(dofs, dofs);
  zeroth.setFromTriplets(potential.begin(), potential.end());
  block.stiffness = energy + zeroth;
  block.stiffness.prune(0.0);

  block.mass = Eigen::VectorXd::Zero(dofs);
  for (Index i = 1; i < N; ++i) block.mass(i) = h;
  block.boundary = {0, d0, N, dN};
  for (Index i = 1; i < N; ++i) block.interior.push_back(i);
  return block;
}

void finalize(ModelProblem& p) {
  p.field_dimension = 0;
  p.label_offset.clear();
  for (auto& block : p.blocks) {
    block.field_index.assign(static_cast<std::size_t>(block.dofs()), -1);
    for (Index i = 0; i < block.dofs(); ++i)
      if (block.mass(i) > 0.0) block.field_index[static_cast<std::size_t>(i)] = p.field_dimension++;
  }
  Index offset = 0;
  for (const auto& block : p.blocks) {
    p.label_offset.push_back(offset);
    offset += static_cast<Index>(block.boundary.size());
  }
}

}  // namespace

ModelProblem build_interval_m1(double length, Index nodes, const Potential& q) {
  require(length > 0.0, "interval length must be positive");
  require(nodes >= 16, "interval_m1 needs N >= 16");
  ModelProblem p;
  p.kind = ProblemKind::interval_m1;
  p.n = 1;
  p.m = 1;
  p.nodes = nodes;
  p.start = 0.0;
  p.end = length;
  p.h = length / static_cast<double>(nodes);
  p.potential = q;
  p.blocks.push_back(second_order_block(p, 0, 1, 0.0));
  p.labels = {{0, 0, 0, 1}, {0, 1, 0, 1}};
  finalize(p);
  return p;
}

ModelProblem build_halfline_m1(double truncation, Index nodes, const Potential& q) {
  require(truncation > 0.0, "truncation length must be positive");
  require(nodes >= 16, "halfline_m1 needs N >= 16");
  require(q(truncation) > 0.0, "halfline potential must tend to a positive constant");
  ModelProblem p;
  p.kind = ProblemKind::halfline_m1;
  p.n = 1;
  p.m = 1;
  p.nodes = nodes;
  p.start = 0.0;
  p.end = truncation;
  p.h = truncation / static_cast<double>(nodes);
  p.truncated = true;
  p.potential = q;
  p.blocks.push_back(second_order_block(p, 0, 1, 0.0));
  p.labels = {{0, 0, 0, 1}};
  finalize(p);
  return p;
}

ModelProblem build_interval_m2(double length, Index nodes, const Potential& q) {
  require(length > 0.0, "interval length must be positive");
  require(nodes >= 32, "interval_m2 needs N >= 32");
  ModelProblem p;
  p.kind = ProblemKind::interval_m2;
  p.n = 1;
  p.m = 2;
  p.nodes = nodes;
  p.start = 0.0;
  p.end = length;
  p.h = length / static_cast<double>(nodes);
  p.potential = q;
  p.blocks.push_back(fourth_order_block(p));
  p.labels = {{0, 0, 0, 1}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 1}};
  finalize(p);
  return p;
}

ModelProblem build_annulus_m1(double r_inner, double r_outer, Index nodes, int k_max,
                              const Potential& q) {
  require(r_inner > 0.0 && r_outer > r_inner, "annulus needs 0 < r_inner < r_outer");
  require(k_max >= 8, "annulus needs K_max >= 8");
  require(nodes >= 16, "annulus needs N >= 16");
  ModelProblem p;
  p.kind = ProblemKind::annulus_m1;
  p.n = 2;
  p.m = 1;
  p.nodes = nodes;
  p.start = r_inner;
  p.end = r_outer;
  p.h = (r_outer - r_inner) / static_cast<double>(nodes);
  p.truncated = true;
  p.boundary_measure = r_inner;
  p.potential = q;
  for (int k = -k_max; k <= k_max; ++k) {
    p.blocks.push_back(second_order_block(p, k, 1, double(k) * k));
    p.labels.push_back({k, 0, 0, 1});
  }
  finalize(p);
  return p;
}

ModelProblem build_ball_exterior_m1(double r_inner, double truncation, Index nodes, int l_max,
                                    const Potential& q) {
  require(r_inner > 0.0 && truncation > 2.0 * r_inner, "ball exterior needs R > 2 r_inner > 0");
  require(l_max >= 0, "ball exterior needs L_max >= 0");
  require(nodes >= 16, "ball exterior needs N >= 16");
  require(q(truncation) > 0.0, "exterior potential must tend to a positive constant");
  ModelProblem p;
  p.kind = ProblemKind::ball_exterior_m1;
  p.n = 3;
  p.m = 1;
  p.nodes = nodes;
  p.start = r_inner;
  p.end = truncation;
  p.h = (truncation - r_inner) / static_cast<double>(nodes);
  p.truncated = true;
  p.boundary_measure = r_inner * r_inner;
  p.potential = q;
  for (int l = 0; l <= l_max; ++l) {
    p.blocks.push_back(second_order_block(p, l, 2 * l + 1, double(l) * (l + 1)));
    p.labels.push_back({l, 0, 0, 2 * l + 1});
  }
  finalize(p);
  return p;
}

KSpec KSpec::constant(Complex sigma) {
  KSpec k;
  k.kind = Kind::scalar;
  k.scalar = sigma;
  return k;
}

KSpec KSpec::mode_multiplier(std::function<Complex(int)> f, std::string name) {
  KSpec k;
  k.kind = Kind::mode_multiplier;
  k.multiplier = std::move(f);
  k.multiplier_name = std::move(name);
  return k;
}

KSpec KSpec::dense_matrix(MatrixXc m) {
  KSpec k;
  k.kind = Kind::dense;
  k.dense = std::move(m);
  return k;
}

KSpec KSpec::angular_function(std::vector<Complex> samples) {
  if (samples.empty()) throw Error(ErrorKind::invalid_config, "angular K needs samples");
  KSpec k;
  k.kind = Kind::angular;
  k.angular_samples = std::move(samples);
  return k;
}

std::string KSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::scalar: os << "scalar(" << scalar.real() << "," << scalar.imag() << ")"; break;
    case Kind::mode_multiplier: os << "mode_multiplier(" << multiplier_name << ")"; break;
    case Kind::dense: os << "dense(" << dense.rows() << "x" << dense.cols() << ")"; break;
    case Kind::angular: os << "angular(" << angular_samples.size() << " samples)"; break;
  }
  return os.str();
}

MatrixXc k_matrix(const ModelProblem& p, const KSpec& k) {
  const Index nb = p.boundary_basis_size();
  switch (k.kind) {
    case KSpec::Kind::scalar:
      return k.scalar * MatrixXc::Identity(nb, nb);
    case KSpec::Kind::mode_multiplier: {
      MatrixXc out = MatrixXc::Zero(nb, nb);
      for (Index i = 0; i < nb; ++i) out(i, i) = k.multiplier(p.labels[static_cast<std::size_t>(i)].mode);
      return out;
    }
    case KSpec::Kind::dense:
      if (k.dense.rows() != nb || k.dense.cols() != nb)
        throw Error(ErrorKind::dimension_mismatch, "dense K is " + std::to_string(k.dense.rows()) + "x" +
                                                       std::to_string(k.dense.cols()) +
                                                       ", boundary space has " + std::to_string(nb));
      return k.dense;
    case KSpec::Kind::angular: {
      if (p.kind != ProblemKind::annulus_m1)
        throw Error(ErrorKind::invalid_config, "angular K is defined on the circle only");
      const auto samples = static_cast<double>(k.angular_samples.size());
      auto coefficient = [&](int n) {
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < k.angular_samples.size(); ++j) {
          const double theta = 2.0 * kPi * static_cast<double>(j) / samples;
          acc += k.angular_samples[j] * std::polar(1.0, -double(n) * theta);
        }
        return acc / samples;
      };
      MatrixXc out(nb, nb);
      for (Index a = 0; a < nb; ++a)
        for (Index b = 0; b < nb; ++b)
          out(a, b) = coefficient(p.labels[static_cast<std::size_t>(a)].mode -
                                  p.labels[static_cast<std::size_t>(b)].mode);
      return out;
    }
  }
  return MatrixXc::Zero(nb, nb);
}

}  // namespace spectriples
