#include "spectriples/counting.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>

namespace spectriples {

namespace {

constexpr double kRerunFactor = 1.0 + 1e-3;

// Union-find over boundary labels.
struct Components {
  std::vector<Index> parent;

  explicit Components(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  }
  void join(Index a, Index b) { parent[static_cast<std::size_t>(find(a))] = find(b); }

  std::vector<std::vector<Index>> groups() {
    std::vector<std::vector<Index>> out;
    std::vector<Index> slot(parent.size(), -1);
    for (Index i = 0; i < static_cast<Index>(parent.size()); ++i) {
      const Index root = find(i);
      if (slot[static_cast<std::size_t>(root)] < 0) {
        slot[static_cast<std::size_t>(root)] = static_cast<Index>(out.size());
        out.emplace_back();
      }
      out[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].push_back(i);
    }
    return out;
  }
};

void join_pattern(Components& c, const MatrixXc& x, double tol) {
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (i != j && std::abs(x(i, j)) > tol) c.join(i, j);
}

MatrixXc restrict(const MatrixXc& x, const std::vector<Index>& idx) {
  MatrixXc out(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = x(idx[i], idx[j]);
  return out;
}

int uniform_multiplicity(const std::vector<BoundaryLabel>& labels, const std::vector<Index>& group) {
  const int mult = labels[static_cast<std::size_t>(group.front())].multiplicity;
  for (Index i : group)
    if (labels[static_cast<std::size_t>(i)].multiplicity != mult)
      throw Error(ErrorKind::invalid_combination,
                  "boundary matrix couples labels of different multiplicity");
  return mult;
}

void accumulate(Inertia& total, const Inertia& part, int mult) {
  total.n_minus += mult * part.n_minus;
  total.n_zero += mult * part.n_zero;
  total.n_plus += mult * part.n_plus;
  total.zero_threshold = std::max(total.zero_threshold, part.zero_threshold);
  total.ambiguous = total.ambiguous || part.ambiguous;
  if (part.ldl_agrees) total.ldl_agrees = total.ldl_agrees.value_or(true) && *part.ldl_agrees;
}

// Blocks of the boundary space that neither Lambda nor K couple.
std::vector<std::vector<Index>> boundary_groups(const ModelProblem& p, const MatrixXc& k) {
  Components c(p.boundary_basis_size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (std::size_t j = 1; j < p.blocks[b].boundary.size(); ++j)
      c.join(p.label_offset[b], p.label_offset[b] + static_cast<Index>(j));
  join_pattern(c, k, 0.0);
  return c.groups();
}

void check_k(const MatrixXc& k) {
  const double asym = relative_asymmetry(k);
  if (asym > kHermitianTolerance)
    throw Error(ErrorKind::not_hermitian_k, "K has relative asymmetry " + std::to_string(asym));
}

MatrixXc negative_root_block(const MatrixXc& lambda0) {
  if (relative_asymmetry(lambda0) > 1e-8)
    throw Error(ErrorKind::calderon_not_negative, "Lambda(0) is not self-adjoint");
  const auto eig = hermitian_eigen(MatrixXc((lambda0 + lambda0.adjoint()) / 2.0));
  if (!(eig.values.maxCoeff() < 0.0))
    throw Error(ErrorKind::calderon_not_negative,
                "Lambda(0) has largest eigenvalue " + std::to_string(eig.values.maxCoeff()));
  const Eigen::VectorXd root = (-eig.values.array()).rsqrt().matrix();
  return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

// n_- of I + R (K + sign T) R per boundary group, multiplicity-weighted.
Inertia grouped_count(const ModelProblem& p, const MatrixXc& k, const MatrixXc& lambda0,
                      const MatrixXc* t, double sign) {
  Inertia total;
  for (const auto& group : boundary_groups(p, k)) {
    const int mult = uniform_multiplicity(p.labels, group);
    const MatrixXc r = negative_root_block(restrict(lambda0, group));
    MatrixXc inner = restrict(k, group);
    if (t) inner += sign * restrict(*t, group);
    const MatrixXc x = MatrixXc::Identity(r.rows(), r.cols()) + r * inner * r;
    accumulate(total, inertia(MatrixXc((x + x.adjoint()) / 2.0)), mult);
  }
  return total;
}

std::string interval_text(double a, double b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

CountReport negative_formula(const ModelProblem& p, const MatrixXc& k, const std::string& label) {
  check_k(k);
  const BoundaryOperator lambda0 = calderon(p, 0.0);
  const Inertia in = grouped_count(p, k, lambda0.matrix, nullptr, 0.0);
  CountReport out;
  out.formula_count = in.n_minus;
  out.ambiguous = in.ambiguous;
  out.problem = to_string(p.kind);
  out.k = label;
  out.lower = -std::numeric_limits<double>::infinity();
  out.upper = 0.0;
  return out;
}

CountReport gap_formula(const ModelProblem& p, const MatrixXc& k, const std::string& label,
                        const SpectralGap& g, double epsilon, RootConvention convention) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_value, "epsilon must be positive");
  if (epsilon >= g.width())
    throw Error(ErrorKind::epsilon_too_large,
                "epsilon " + std::to_string(epsilon) + " does not fit in the gap " +
                    interval_text(g.alpha, g.beta));
  check_k(k);
  check_gap(p, g);
  const BoundaryOperator lambda0 = calderon(p, 0.0);
  const double sign = convention == RootConvention::negative_root ? -1.0 : 1.0;
  const double lo = g.alpha + epsilon, hi = g.beta - epsilon;
  const MatrixXc t_hi = calderon(p, hi).matrix - lambda0.matrix;
  const MatrixXc t_lo = calderon(p, lo).matrix - lambda0.matrix;
  const Inertia upper = grouped_count(p, k, lambda0.matrix, &t_hi, sign);
  const Inertia lower = grouped_count(p, k, lambda0.matrix, &t_lo, sign);
  CountReport out;
  out.formula_count = upper.n_minus - lower.n_minus;
  out.ambiguous = upper.ambiguous || lower.ambiguous;
  out.problem = to_string(p.kind);
  out.k = label;
  out.lower = g.alpha;
  out.upper = hi;
  out.epsilon = epsilon;
  return out;
}

}  // namespace

const char* to_string(RootConvention c) {
  return c == RootConvention::negative_root ? "negative_root" : "as_written";
}

RootConvention root_convention_from_string(const std::string& name) {
  if (name == "negative_root") return RootConvention::negative_root;
  if (name == "as_written") return RootConvention::as_written;
  throw Error(ErrorKind::invalid_value, "lambda_root_convention: unknown value '" + name + "'");
}

std::vector<SpectralGap> find_gaps(const SpectrumList& s, std::pair<double, double> window,
                                   double min_width) {
  if (!s.hermitian) throw Error(ErrorKind::not_hermitian, "gaps need a Hermitian spectrum");
  std::vector<double> inside;
  for (double v : s.values)
    if (v > window.first && v < window.second) inside.push_back(v);
  std::sort(inside.begin(), inside.end());
  std::vector<SpectralGap> out;
  for (std::size_t i = 1; i < inside.size(); ++i)
    if (inside[i] - inside[i - 1] > min_width) out.push_back({inside[i - 1], inside[i], s.source});
  return out;
}

Index count_direct(const Realization& r, std::pair<double, double> interval) {
  if (!r.hermitian) throw Error(ErrorKind::not_hermitian, "direct counts need a Hermitian realization");
  if (!(interval.first < interval.second)) return 0;
  return spectrum(r, interval).count();
}

MatrixXc negative_root(const BoundaryOperator& lambda0) { return negative_root_block(lambda0.matrix); }

Inertia boundary_inertia(const MatrixXc& x, const std::vector<BoundaryLabel>& labels) {
  if (x.rows() != static_cast<Index>(labels.size()) || x.cols() != x.rows())
    throw Error(ErrorKind::dimension_mismatch, "boundary matrix does not match its labels");
  Components c(x.rows());
  join_pattern(c, x, 1e-14 * x.cwiseAbs().maxCoeff());
  Inertia total;
  for (const auto& group : c.groups()) {
    const MatrixXc block = restrict(x, group);
    accumulate(total, inertia(block), uniform_multiplicity(labels, group));
  }
  return total;
}

Inertia boundary_count(const ModelProblem& p, const MatrixXc& k, double x, RootConvention convention) {
  check_k(k);
  const BoundaryOperator lambda0 = calderon(p, 0.0);
  const MatrixXc t = calderon(p, x).matrix - lambda0.matrix;
  return grouped_count(p, k, lambda0.matrix, &t,
                       convention == RootConvention::negative_root ? -1.0 : 1.0);
}

CountReport count_negative_formula(const ModelProblem& p, const KSpec& k) {
  return negative_formula(p, k_matrix(p, k), k.describe());
}

CountReport count_negative_formula(const ModelProblem& p, const MatrixXc& k) {
  return negative_formula(p, k, "dense matrix");
}

CountReport gap_count_formula(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                              double epsilon, RootConvention convention) {
  return gap_formula(p, k_matrix(p, k), k.describe(), g, epsilon, convention);
}

void check_gap(const ModelProblem& p, const SpectralGap& g) {
  if (!(g.alpha < g.beta)) throw Error(ErrorKind::not_a_gap, "gap endpoints are not ordered");
  const Index inside = spectrum(dirichlet_realization(p), std::make_pair(g.alpha, g.beta)).count();
  if (inside > 0)
    throw Error(ErrorKind::not_a_gap, std::to_string(inside) + " Dirichlet eigenvalue(s) in " +
                                          interval_text(g.alpha, g.beta));
}

double left_edge_buffer(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                        const std::vector<double>& epsilon_grid) {
  if (epsilon_grid.empty()) throw Error(ErrorKind::invalid_config, "epsilon grid is empty");
  check_gap(p, g);
  const SpectrumList s = spectrum(realization_with_k(p, k), std::make_pair(g.alpha, g.beta));
  const std::vector<double> values = s.expanded();
  double best = 0.0;
  for (double eps : epsilon_grid) {
    const bool empty = std::none_of(values.begin(), values.end(),
                                    [&](double v) { return v > g.alpha && v < g.alpha + eps; });
    if (empty) best = std::max(best, eps);
  }
  return best;
}

bool sector_check(const Realization& r, Complex vertex, double semi_angle, double slack) {
  const SpectrumList s = spectrum(r);
  auto inside = [&](Complex lambda) {
    const Complex d = lambda - vertex;
    if (d == Complex(0.0, 0.0)) return true;
    return std::abs(std::arg(d)) <= semi_angle + slack;
  };
  if (s.hermitian)
    return std::all_of(s.values.begin(), s.values.end(), [&](double v) { return inside(Complex(v, 0.0)); });
  return std::all_of(s.complex_values.begin(), s.complex_values.end(), inside);
}

CountReport verify_negative_count(const ModelProblem& p, const KSpec& k) {
  MatrixXc km = k_matrix(p, k);
  CountReport out = negative_formula(p, km, k.describe());
  if (out.ambiguous) {
    km *= kRerunFactor;
    out = negative_formula(p, km, k.describe() + " (scaled by 1.001)");
    out.rerun = true;
  }
  out.direct_count = count_direct(realization_with_k(p, km, out.k),
                                  {-std::numeric_limits<double>::infinity(), 0.0});
  return out;
}

CountReport verify_gap_count(const ModelProblem& p, const KSpec& k, const SpectralGap& g,
                             double epsilon, RootConvention convention) {
  const MatrixXc km = k_matrix(p, k);
  CountReport out = gap_formula(p, km, k.describe(), g, epsilon, convention);
  if (out.ambiguous) {
    out = gap_formula(p, km, k.describe(), g, epsilon * kRerunFactor, convention);
    out.rerun = true;
  }
  out.direct_count = count_direct(realization_with_k(p, km, out.k), {g.alpha, out.upper});
  return out;
}

}  // namespace spectriples
