#include "spectriples/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>

#include "spectriples/numerics.hpp"
#include "spectriples/shifted_solver.hpp"

namespace spectriples {

namespace {

constexpr Index kOversampling = 10;
constexpr double kFloor = 1e-12;

void check_power(int l) {
  if (l < 1) throw Error(ErrorKind::invalid_value, "resolvent power must be a positive integer");
}

void check_fields(const Realization& r1, const Realization& r2) {
  if (r1.field_dimension != r2.field_dimension)
    throw Error(ErrorKind::dimension_mismatch, "realizations live on different field spaces");
}

// (A - z)^{-l} of one realization, scattered onto the field space.
MatrixXc dense_resolvent_power(const Realization& r, Complex z, int l) {
  std::vector<Index> dofs;
  for (const auto& b : r.blocks) dofs.insert(dofs.end(), b.dofs.begin(), b.dofs.end());
  std::sort(dofs.begin(), dofs.end());
  std::vector<Index> local(static_cast<std::size_t>(r.field_dimension), -1);
  for (std::size_t i = 0; i < dofs.size(); ++i) local[static_cast<std::size_t>(dofs[i])] = static_cast<Index>(i);

  const auto n = static_cast<Index>(dofs.size());
  MatrixXc a = MatrixXc::Zero(n, n);
  for (const auto& b : r.blocks)
    for (Index c = 0; c < b.matrix.outerSize(); ++c)
      for (SparseMatrixXc::InnerIterator it(b.matrix, c); it; ++it)
        a(local[static_cast<std::size_t>(b.dofs[static_cast<std::size_t>(it.row())])],
          local[static_cast<std::size_t>(b.dofs[static_cast<std::size_t>(it.col())])]) = it.value();
  a.diagonal().array() -= z;

  Eigen::PartialPivLU<MatrixXc> lu(a);
  if (!(lu.rcond() >= 100.0 * kEpsilon))
    throw Error(ErrorKind::spectrum_hit, "z is numerically in the spectrum of " + r.description);
  MatrixXc power = MatrixXc::Identity(n, n);
  for (int k = 0; k < l; ++k) power = lu.solve(power);

  MatrixXc out = MatrixXc::Zero(r.field_dimension, r.field_dimension);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)]) = power(i, j);
  return out;
}

// One realization restricted to a group of field dofs.
struct GroupOperator {
  std::vector<Index> local;    // positions (in the group) of the dofs it carries
  SparseMatrixXc matrix;       // on those dofs, in `local` order
  std::unique_ptr<ShiftedSolver> solver, adjoint_solver;

  VectorXc apply(const VectorXc& x, int l, bool adjoint) const {
    VectorXc y(static_cast<Index>(local.size()));
    for (std::size_t i = 0; i < local.size(); ++i) y(static_cast<Index>(i)) = x(local[i]);
    for (int k = 0; k < l; ++k) y = adjoint ? adjoint_solver->solve(y) : solver->solve(y);
    VectorXc out = VectorXc::Zero(x.size());
    for (std::size_t i = 0; i < local.size(); ++i) out(local[i]) = y(static_cast<Index>(i));
    return out;
  }
};

GroupOperator group_operator(const Realization& r, const std::vector<Index>& blocks,
                             const std::map<Index, Index>& position, Complex z) {
  GroupOperator g;
  std::vector<Eigen::Triplet<Complex>> t;
  Index offset = 0;
  for (Index bi : blocks) {
    const RealizationBlock& b = r.blocks[static_cast<std::size_t>(bi)];
    for (Index d : b.dofs) g.local.push_back(position.at(d));
    for (Index c = 0; c < b.matrix.outerSize(); ++c)
      for (SparseMatrixXc::InnerIterator it(b.matrix, c); it; ++it)
        t.emplace_back(offset + it.row(), offset + it.col(), it.value());
    offset += static_cast<Index>(b.dofs.size());
  }
  g.matrix.resize(offset, offset);
  g.matrix.setFromTriplets(t.begin(), t.end());
  if (offset > 0) {
    g.solver = std::make_unique<ShiftedSolver>(shifted(g.matrix, z), ErrorKind::spectrum_hit,
                                               "resolvent of " + r.description);
    const SparseMatrixXc adj = g.matrix.adjoint();
    g.adjoint_solver = std::make_unique<ShiftedSolver>(shifted(adj, std::conj(z)), ErrorKind::spectrum_hit,
                                                       "adjoint resolvent of " + r.description);
  }
  return g;
}

// Group dofs where the two operators differ: dofs carried by only one of them,
// and shared dofs whose rows differ.
Index differing_rows(const GroupOperator& a, const GroupOperator& b, Index size) {
  std::vector<char> in_a(static_cast<std::size_t>(size), 0), in_b(static_cast<std::size_t>(size), 0);
  for (Index i : a.local) in_a[static_cast<std::size_t>(i)] = 1;
  for (Index i : b.local) in_b[static_cast<std::size_t>(i)] = 1;
  auto embed = [&](const GroupOperator& g) {
    std::vector<Eigen::Triplet<Complex>> t;
    for (Index c = 0; c < g.matrix.outerSize(); ++c)
      for (SparseMatrixXc::InnerIterator it(g.matrix, c); it; ++it)
        t.emplace_back(g.local[static_cast<std::size_t>(it.row())], g.local[static_cast<std::size_t>(it.col())],
                       it.value());
    SparseMatrixXc m(size, size);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  const SparseMatrixXc diff = SparseMatrixXc(embed(a) - embed(b)).transpose();
  std::vector<char> flagged(static_cast<std::size_t>(size), 0);
  for (Index i = 0; i < size; ++i)
    if (in_a[static_cast<std::size_t>(i)] != in_b[static_cast<std::size_t>(i)]) flagged[static_cast<std::size_t>(i)] = 1;
  for (Index c = 0; c < diff.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(diff, c); it; ++it)
      if (it.value() != Complex(0.0, 0.0)) flagged[static_cast<std::size_t>(c)] = 1;
  return std::accumulate(flagged.begin(), flagged.end(), Index{0});
}

}  // namespace

MatrixXc resolvent_power_difference(const Realization& r1, const Realization& r2, Complex z, int l) {
  check_power(l);
  check_fields(r1, r2);
  return dense_resolvent_power(r1, z, l) - dense_resolvent_power(r2, z, l);
}

std::vector<BlockSingularValues> resolvent_difference_singular_values(const Realization& r1,
                                                                      const Realization& r2,
                                                                      Complex z, int l,
                                                                      unsigned seed) {
  check_power(l);
  check_fields(r1, r2);

  // Union-find over the blocks of both realizations, joined through shared dofs.
  const Index n1 = static_cast<Index>(r1.blocks.size());
  const Index total = n1 + static_cast<Index>(r2.blocks.size());
  std::vector<Index> parent(static_cast<std::size_t>(total));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    return i;
  };
  std::vector<Index> owner(static_cast<std::size_t>(r1.field_dimension), -1);
  auto visit = [&](const Realization& r, Index shift) {
    for (Index b = 0; b < static_cast<Index>(r.blocks.size()); ++b)
      for (Index d : r.blocks[static_cast<std::size_t>(b)].dofs) {
        Index& o = owner[static_cast<std::size_t>(d)];
        if (o < 0)
          o = b + shift;
        else
          parent[static_cast<std::size_t>(find(b + shift))] = find(o);
      }
  };
  visit(r1, 0);
  visit(r2, n1);

  std::map<Index, std::pair<std::vector<Index>, std::vector<Index>>> groups;
  for (Index b = 0; b < total; ++b) {
    auto& g = groups[find(b)];
    (b < n1 ? g.first : g.second).push_back(b < n1 ? b : b - n1);
  }

  std::vector<BlockSingularValues> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (const auto& [root, members] : groups) {
    (void)root;
    std::vector<Index> dofs;
    int multiplicity = 0;
    BlockSingularValues result;
    auto collect = [&](const Realization& r, const std::vector<Index>& blocks) {
      for (Index bi : blocks) {
        const RealizationBlock& b = r.blocks[static_cast<std::size_t>(bi)];
        dofs.insert(dofs.end(), b.dofs.begin(), b.dofs.end());
        if (multiplicity == 0) multiplicity = b.multiplicity;
        if (b.multiplicity != multiplicity)
          throw Error(ErrorKind::invalid_combination, "coupled blocks carry different multiplicities");
        result.source_blocks.insert(result.source_blocks.end(), b.source_blocks.begin(), b.source_blocks.end());
      }
    };
    collect(r1, members.first);
    collect(r2, members.second);
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    std::sort(result.source_blocks.begin(), result.source_blocks.end());
    result.source_blocks.erase(std::unique(result.source_blocks.begin(), result.source_blocks.end()),
                               result.source_blocks.end());
    result.multiplicity = multiplicity;

    std::map<Index, Index> position;
    for (std::size_t i = 0; i < dofs.size(); ++i) position[dofs[i]] = static_cast<Index>(i);
    const auto size = static_cast<Index>(dofs.size());
    const GroupOperator a = group_operator(r1, members.first, position, z);
    const GroupOperator b = group_operator(r2, members.second, position, z);
    result.rank_bound = std::min<Index>(size, Index(l) * differing_rows(a, b, size));

    auto apply = [&](const VectorXc& x, bool adjoint) {
      VectorXc y = VectorXc::Zero(size);
      if (a.solver) y += a.apply(x, l, adjoint);
      if (b.solver) y -= b.apply(x, l, adjoint);
      return y;
    };

    const Index sketch = std::min<Index>(size, result.rank_bound + kOversampling);
    MatrixXc y(size, sketch);
    for (Index c = 0; c < sketch; ++c) {
      VectorXc omega(size);
      for (Index i = 0; i < size; ++i) omega(i) = Complex(normal(rng), normal(rng));
      y.col(c) = apply(omega, false);
    }
    const MatrixXc q = Eigen::HouseholderQR<MatrixXc>(y).householderQ() * MatrixXc::Identity(size, sketch);
    MatrixXc bt(size, sketch);  // (Q^* D)^*
    for (Index c = 0; c < sketch; ++c) bt.col(c) = apply(q.col(c), true);
    result.values = singular_values(bt);
    out.push_back(std::move(result));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.source_blocks < y.source_blocks; });
  return out;
}

SingularValueList leading_block_values(const std::vector<BlockSingularValues>& blocks, bool expand) {
  SingularValueList out;
  out.multiplicity_expanded = expand;
  for (const auto& b : blocks) {
    const double lead = b.values.size() > 0 ? b.values(0) : 0.0;
    const int copies = expand ? b.multiplicity : 1;
    out.values.insert(out.values.end(), static_cast<std::size_t>(copies), lead);
    out.expanded_dimension += b.multiplicity;
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

SingularValueList all_singular_values(const MatrixXc& m) {
  SingularValueList out;
  const Eigen::VectorXd s = singular_values(m);
  out.values.assign(s.data(), s.data() + s.size());
  out.expanded_dimension = static_cast<Index>(out.values.size());
  return out;
}

const char* to_string(SchattenClass c) {
  switch (c) {
    case SchattenClass::general: return "general";
    case SchattenClass::dirichlet_bounded: return "dirichlet_bounded";
    case SchattenClass::elliptic: return "elliptic";
  }
  return "?";
}

SchattenClass schatten_class_from_string(const std::string& name) {
  if (name == "general") return SchattenClass::general;
  if (name == "dirichlet_bounded") return SchattenClass::dirichlet_bounded;
  if (name == "elliptic") return SchattenClass::elliptic;
  throw Error(ErrorKind::invalid_value, "class: unknown value '" + name + "'");
}

SchattenIndex predicted_schatten_exponent(int n, int m, int l, SchattenClass cls) {
  if (n < 2) throw Error(ErrorKind::invalid_combination, "Schatten prediction needs n >= 2");
  if (m < 1 || l < 1) throw Error(ErrorKind::invalid_combination, "m and l must be positive");
  SchattenIndex p;
  switch (cls) {
    case SchattenClass::general:  // (n-1) / (2ml - 1/2)
      p = {2L * (n - 1), 4L * m * l - 1};
      break;
    case SchattenClass::dirichlet_bounded:
      if (l != 1) throw Error(ErrorKind::invalid_combination, "dirichlet_bounded needs l = 1");
      p = {long(n - 1), 2L * m};
      break;
    case SchattenClass::elliptic:
      p = {long(n - 1), 2L * m * l};
      break;
  }
  const long g = std::gcd(p.numerator, p.denominator);
  return {p.numerator / g, p.denominator / g};
}

DecayFit fit_decay_exponent(const SingularValueList& s, double tail_fraction, Index drop_head) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw Error(ErrorKind::invalid_value, "tail_fraction must lie in (0, 1]");
  if (drop_head < 0) throw Error(ErrorKind::invalid_value, "drop_head must be nonnegative");
  const double s1 = s.values.empty() ? 0.0 : s.values.front();
  std::vector<std::pair<double, double>> points;  // (log j, log s_j)
  for (std::size_t i = static_cast<std::size_t>(drop_head); i < s.values.size(); ++i) {
    const double v = s.values[i];
    if (v > kFloor * s1 && v > 0.0) points.emplace_back(std::log(double(i + 1)), std::log(v));
  }
  const auto keep = static_cast<std::size_t>(std::ceil(tail_fraction * double(points.size())));
  points.erase(points.begin(), points.end() - static_cast<std::ptrdiff_t>(keep));
  if (points.size() < 10)
    throw Error(ErrorKind::insufficient_tail,
                std::to_string(points.size()) + " points left after windowing, need 10");

  const double n = double(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) mx += x, my += y;
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (my + slope * (x - mx));
    ss_res += r * r;
  }
  DecayFit fit;
  fit.fitted_exponent = -slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.first = static_cast<Index>(std::llround(std::exp(points.front().first)));
  fit.last = static_cast<Index>(std::llround(std::exp(points.back().first)));
  fit.points = static_cast<Index>(points.size());
  return fit;
}

DecayFit fit_decay_exponent(const SingularValueList& s) {
  return fit_decay_exponent(s, 1.0, static_cast<Index>(s.values.size() / 10));
}

bool schatten_verdict(const DecayFit& fit, double margin) {
  if (!fit.predicted) throw Error(ErrorKind::invalid_value, "verdict needs a predicted Schatten index");
  return fit.fitted_exponent >= fit.predicted->exponent() - margin;
}

}  // namespace spectriples
