#include "spectriples/tasks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "spectriples/boundary.hpp"
#include "spectriples/counting.hpp"
#include "spectriples/numerics.hpp"
#include "spectriples/schatten.hpp"

namespace spectriples {

using nlohmann::json;

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json labels_json(const std::vector<BoundaryLabel>& labels) {
  json out = json::array();
  for (const auto& l : labels)
    out.push_back({{"mode", l.mode}, {"point", l.point}, {"trace_order", l.trace_order}, {"multiplicity", l.multiplicity}});
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_json(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        os << format_double(x);
      else
        os << (std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\""));
      return;
    }
    default:
      os << j.dump();
  }
}

// Nodal probes on the problem's coordinate range [start, end].
struct ProbePair {
  std::function<Complex(double)> u, v;
};

std::vector<Complex> coefficients(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> normal;
  std::vector<Complex> c;
  for (int i = 0; i < count; ++i) c.emplace_back(normal(rng), normal(rng));
  return c;
}

std::function<Complex(double)> trig_series(const std::vector<Complex>& c, double a, double b) {
  return [c, a, b](double x) {
    const double s = (x - a) / (b - a);
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * std::cos(kPi * double(j) * s + 0.3 * double(j));
    return acc;
  };
}

ProbePair compact_probes(const ModelProblem& p, unsigned long seed) {
  std::mt19937_64 rng(seed);
  const double a = p.start, b = p.end;
  const double lo = a + 0.25 * (b - a), hi = b - 0.25 * (b - a);
  auto bump = [lo, hi](double x) {
    const double t = (2.0 * x - lo - hi) / (hi - lo);
    return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
  };
  const auto fu = trig_series(coefficients(rng, 4), a, b);
  const auto fv = trig_series(coefficients(rng, 4), a, b);
  return {[=](double x) { return bump(x) * fu(x); }, [=](double x) { return bump(x) * fv(x); }};
}

ProbePair smooth_probes(const ModelProblem& p, unsigned long seed) {
  std::mt19937_64 rng(seed);
  const double a = p.start, b = p.end;
  const bool taper = p.truncated;
  const auto fu = trig_series(coefficients(rng, 4), a, b);
  const auto fv = trig_series(coefficients(rng, 4), a, b);
  auto weight = [a, b, taper](double x) { return taper ? std::pow(1.0 - (x - a) / (b - a), 4) : 1.0; };
  return {[=](double x) { return weight(x) * fu(x); }, [=](double x) { return weight(x) * fv(x); }};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

class TaskRun {
 public:
  explicit TaskRun(const ExperimentConfig& cfg) : cfg_(cfg), p_(build_problem(cfg.problem)) {}

  ReportRecord run() {
    const std::string& type = cfg_.task.type;
    if (type == "green-check") green_check();
    else if (type == "calderon") calderon_task();
    else if (type == "weyl") weyl_task();
    else if (type == "count") count_task();
    else if (type == "gaps") gaps_task();
    else if (type == "gap-count") gap_count_task();
    else if (type == "schatten") schatten_task();
    else throw Error(ErrorKind::invalid_config, "unknown task '" + type + "'");

    const Tolerances& t = cfg_.tolerances;
    json tolerances = {{"hermitian", t.hermitian},
                       {"green_relative", t.green_relative},
                       {"green_slope", green_slope()},
                       {"schatten_margin", t.schatten_margin},
                       {"compactness_ratio", t.compactness_ratio},
                       {"finite_rank", t.finite_rank}};
    json verdicts = json::array();
    for (const auto& v : record_.verdicts)
      verdicts.push_back({{"rule", v.rule}, {"pass", v.passed}, {"value", v.value},
                          {"threshold", v.threshold}, {"detail", v.detail}});
    record_.document = {{"task", type},
                        {"problem", {{"kind", to_string(p_.kind)},
                                     {"nodes", p_.nodes},
                                     {"h", p_.h},
                                     {"potential", p_.potential.describe()},
                                     {"boundary_basis_size", p_.boundary_basis_size()},
                                     {"boundary_dimension", p_.boundary_dimension()},
                                     {"field_dimension", p_.field_dimension}}},
                        {"config", serialize_config(cfg_)},
                        {"input_hash", input_hash(cfg_)},
                        {"seed", cfg_.task.seed},
                        {"results", results_},
                        {"tolerances", tolerances},
                        {"verdicts", verdicts},
                        {"pass", record_.passed()}};
    return std::move(record_);
  }

 private:
  void verdict(std::string rule, bool passed, double value, double threshold, std::string detail) {
    record_.verdicts.push_back({std::move(rule), passed, value, threshold, std::move(detail)});
  }

  void side_file(std::string name, MatrixXc m, bool complex_entries) {
    record_.side_files.push_back({std::move(name), std::move(m), complex_entries});
  }

  double green_slope() const {
    return cfg_.tolerances.green_slope.value_or(p_.m == 1 ? 1.8 : 0.8);
  }

  KSpec k_spec() const { return build_k(cfg_.k, p_, cfg_.base_directory); }

  void require_k() const {
    if (cfg_.k.type == "none")
      throw Error(ErrorKind::missing_key, "'k.type' (task " + cfg_.task.type + " needs a boundary operator K)");
  }

  std::vector<Complex> z_values(std::vector<Complex> fallback) const {
    return cfg_.task.z.empty() ? fallback : cfg_.task.z;
  }

  void green_check() {
    const auto& t = cfg_.task;
    results_["probe"] = t.probe;
    if (t.probe == "compact") {
      const ProbePair probe = compact_probes(p_, t.seed);
      const GreenResidual g = green_residual(p_, sample(p_, probe.u), sample(p_, probe.v));
      results_["residual"] = g.residual;
      results_["scale"] = g.scale;
      results_["relative_residual"] = g.relative();
      verdict("green_compact_relative", g.relative() <= cfg_.tolerances.green_relative, g.relative(),
              cfg_.tolerances.green_relative, "relative residual of compactly supported probes");
      return;
    }
    std::vector<Index> nodes = t.refinements;
    if (nodes.empty()) nodes = {p_.nodes, 2 * p_.nodes, 4 * p_.nodes};
    if (nodes.size() < 2) throw Error(ErrorKind::invalid_value, "'task.refinements': need at least two node counts");
    std::vector<double> hs, residuals;
    json rows = json::array();
    for (Index n : nodes) {
      ProblemConfig pc = cfg_.problem;
      pc.nodes = n;
      const ModelProblem p = build_problem(pc);
      const ProbePair probe = smooth_probes(p, t.seed);
      const GreenResidual g = green_residual(p, sample(p, probe.u), sample(p, probe.v));
      hs.push_back(p.h);
      residuals.push_back(std::max(g.residual, 1e-300));
      rows.push_back({{"nodes", n}, {"h", p.h}, {"residual", g.residual}, {"relative_residual", g.relative()}});
    }
    const double slope = loglog_slope(hs, residuals);
    results_["refinement"] = rows;
    results_["slope"] = slope;
    verdict("green_refinement_slope", slope >= green_slope(), slope, green_slope(),
            "log-log slope of the residual against h for smooth probes");
  }

  void calderon_task() {
    const auto zs = z_values({0.0});
    json rows = json::array();
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const BoundaryOperator lambda = calderon(p_, zs[i]);
      json row = {{"z", complex_json(zs[i])}, {"file", "calderon_" + std::to_string(i) + ".csv"}};
      json diag = json::array();
      for (Index d = 0; d < lambda.size(); ++d) diag.push_back(complex_json(lambda.matrix(d, d)));
      row["diagonal"] = diag;
      if (zs[i].imag() == 0.0) {
        const double asym = relative_asymmetry(lambda.matrix);
        row["relative_asymmetry"] = asym;
        verdict("calderon_selfadjoint_z" + std::to_string(i), asym <= cfg_.tolerances.hermitian, asym,
                cfg_.tolerances.hermitian, "Lambda(z) at real z is self-adjoint");
        const double top = hermitian_eigenvalues(MatrixXc((lambda.matrix + lambda.matrix.adjoint()) / 2.0)).maxCoeff();
        row["max_eigenvalue"] = top;
        if (zs[i] == Complex(0.0, 0.0) && p_.potential.lower_bound() > 0.0)
          verdict("calderon_negative_definite", top < 0.0, top, 0.0, "largest eigenvalue of Lambda(0)");
      }
      rows.push_back(row);
      side_file("calderon_" + std::to_string(i) + ".csv", lambda.matrix, true);
    }
    results_["labels"] = labels_json(p_.labels);
    results_["calderon"] = rows;
  }

  void weyl_task() {
    const auto zs = z_values({0.0, Complex(0.0, 1.0), Complex(1.0, 1.0)});
    json rows = json::array();
    std::vector<std::pair<double, MatrixXc>> real_points;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const BoundaryOperator m = weyl_function(p_, zs[i]);
      json row = {{"z", complex_json(zs[i])}, {"file", "weyl_" + std::to_string(i) + ".csv"}};
      if (zs[i] == Complex(0.0, 0.0)) {
        const double biggest = m.matrix.cwiseAbs().maxCoeff();
        row["max_abs"] = biggest;
        verdict("weyl_zero_at_origin", biggest == 0.0, biggest, 0.0, "M(0) vanishes identically");
      }
      if (zs[i].imag() > 0.0) {
        const MatrixXc im = (m.matrix - m.matrix.adjoint()) / Complex(0.0, 2.0);
        const double low = hermitian_eigenvalues(im).minCoeff();
        row["min_eigenvalue_imaginary_part"] = low;
        verdict("weyl_herglotz_" + std::to_string(i), low > 0.0, low, 0.0, "Im M(z) is positive definite");
      }
      if (zs[i].imag() == 0.0) real_points.emplace_back(zs[i].real(), calderon(p_, zs[i]).matrix);
      rows.push_back(row);
      side_file("weyl_" + std::to_string(i) + ".csv", m.matrix, true);
    }
    std::sort(real_points.begin(), real_points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < real_points.size(); ++i) {
      const MatrixXc diff = real_points[i].second - real_points[i - 1].second;
      const double low = hermitian_eigenvalues(MatrixXc((diff + diff.adjoint()) / 2.0)).minCoeff();
      const double scale = real_points[i].second.norm();
      const double floor = -cfg_.tolerances.hermitian * scale;
      verdict("calderon_monotone_" + std::to_string(i), low >= floor, low, floor,
              "Lambda(x2) - Lambda(x1) is positive semidefinite for x1 < x2");
    }
    results_["labels"] = labels_json(p_.labels);
    results_["weyl"] = rows;
  }

  json count_json(const CountReport& r) const {
    json j = {{"formula_count", r.formula_count},
              {"direct_count", r.direct_count ? json(*r.direct_count) : json()},
              {"agree", r.agree()},
              {"ambiguous", r.ambiguous},
              {"rerun", r.rerun},
              {"k", r.k},
              {"interval", json::array({r.lower, r.upper})}};
    if (r.epsilon) j["epsilon"] = *r.epsilon;
    return j;
  }

  void count_task() {
    require_k();
    const CountReport r = verify_negative_count(p_, k_spec());
    results_["count"] = count_json(r);
    verdict("negative_count_agrees", r.agree(), double(r.formula_count), double(r.direct_count.value_or(-1)),
            "boundary inertia count equals the dense count over (-inf, 0)");
  }

  std::vector<SpectralGap> dirichlet_gaps() const {
    const auto& t = cfg_.task;
    const std::pair<double, double> window{t.window_lower, t.window_upper};
    return find_gaps(spectrum(dirichlet_realization(p_), window), window, t.min_width);
  }

  json gaps_json(const std::vector<SpectralGap>& gaps) const {
    json out = json::array();
    for (const auto& g : gaps) out.push_back({{"alpha", g.alpha}, {"beta", g.beta}, {"width", g.width()}});
    return out;
  }

  void gaps_task() {
    const auto gaps = dirichlet_gaps();
    results_["gaps"] = gaps_json(gaps);
    const Realization d = dirichlet_realization(p_);
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      const Index inside = count_direct(d, {gaps[i].alpha, gaps[i].beta});
      verdict("gap_" + std::to_string(i + 1) + "_empty", inside == 0, double(inside), 0.0,
              "no Dirichlet eigenvalue inside the gap");
    }
  }

  void gap_count_task() {
    require_k();
    const auto& t = cfg_.task;
    const auto gaps = dirichlet_gaps();
    results_["gaps"] = gaps_json(gaps);
    if (static_cast<std::size_t>(t.gap) > gaps.size())
      throw Error(ErrorKind::invalid_value, "'task.gap': only " + std::to_string(gaps.size()) + " gap(s) in the window");
    const SpectralGap& g = gaps[static_cast<std::size_t>(t.gap - 1)];
    const KSpec k = k_spec();
    const RootConvention convention = root_convention_from_string(t.lambda_root_convention);
    json counts = json::array();
    for (double fraction : t.epsilon_fraction) {
      const CountReport r = verify_gap_count(p_, k, g, fraction * g.width(), convention);
      json row = count_json(r);
      row["epsilon_fraction"] = fraction;
      counts.push_back(row);
      verdict("gap_count_agrees_eps" + format_double(fraction), r.agree(), double(r.formula_count),
              double(r.direct_count.value_or(-1)),
              "boundary count equals the dense count over (alpha, beta - epsilon)");
    }
    results_["gap"] = {{"index", t.gap}, {"alpha", g.alpha}, {"beta", g.beta}};
    results_["counts"] = counts;
    results_["lambda_root_convention"] = t.lambda_root_convention;
    if (t.buffer_steps > 0) {
      std::vector<double> grid;
      for (int i = 1; i <= t.buffer_steps; ++i) grid.push_back(g.width() * double(i) / double(t.buffer_steps + 1));
      const double eps0 = left_edge_buffer(p_, k, g, grid);
      results_["left_edge_buffer"] = {{"epsilon0", eps0}, {"grid_step", g.width() / double(t.buffer_steps + 1)}};
      verdict("left_edge_buffer_positive", eps0 > 0.0, eps0, 0.0,
              "no A_K eigenvalue accumulates at the left gap endpoint");
    }
  }

  void schatten_task() {
    const auto& t = cfg_.task;
    const Complex z = t.z.empty() ? Complex(-1.0, 0.0) : t.z.front();
    const Realization r1 = realization_with_k(p_, k_spec());
    const Realization r2 = dirichlet_realization(p_);
    results_["z"] = complex_json(z);
    results_["power"] = t.power;
    results_["pair"] = r1.description + " vs " + r2.description;

    if (p_.n == 1) {
      const SingularValueList s = all_singular_values(resolvent_power_difference(r1, r2, z, t.power));
      const Index bound = Index(t.power) * p_.boundary_dimension();
      const double s1 = s.values.empty() ? 0.0 : s.values.front();
      const double tail = static_cast<std::size_t>(bound) < s.values.size() ? s.values[static_cast<std::size_t>(bound)] : 0.0;
      results_["rank_bound"] = bound;
      results_["largest_singular_value"] = s1;
      results_["first_value_beyond_bound"] = tail;
      const double ratio = s1 > 0.0 ? tail / s1 : 0.0;
      verdict("finite_rank", ratio <= cfg_.tolerances.finite_rank, ratio, cfg_.tolerances.finite_rank,
              "singular values beyond l * dim(boundary space), relative to s_1");
      side_file("singular_values.csv", Eigen::Map<const Eigen::VectorXd>(s.values.data(), Index(s.values.size())).cast<Complex>(), false);
      return;
    }

    const auto blocks = resolvent_difference_singular_values(r1, r2, z, t.power, static_cast<unsigned>(t.seed));
    const SingularValueList s = leading_block_values(blocks, t.expand_multiplicity);
    const Index head = t.drop_head.value_or(static_cast<Index>(s.values.size() / 10));
    DecayFit fit = fit_decay_exponent(s, t.tail_fraction, head);
    fit.predicted = predicted_schatten_exponent(p_.n, p_.m, t.power, schatten_class_from_string(t.schatten_class));
    const bool pass = schatten_verdict(fit, cfg_.tolerances.schatten_margin);
    const double retained = s.values[static_cast<std::size_t>(fit.last - 1)];
    results_["class"] = t.schatten_class;
    results_["predicted_p"] = {{"numerator", fit.predicted->numerator}, {"denominator", fit.predicted->denominator}};
    results_["predicted_exponent"] = fit.predicted->exponent();
    results_["fitted_exponent"] = fit.fitted_exponent;
    results_["r_squared"] = fit.r_squared;
    results_["window"] = json::array({fit.first, fit.last});
    results_["points"] = fit.points;
    results_["values"] = s.values.size();
    results_["multiplicity_expanded"] = t.expand_multiplicity;
    results_["smallest_retained_ratio"] = retained / s.values.front();
    if (cfg_.k.type == "multiplier")
      results_["note"] = "mode-multiplier K is a surrogate for a closed K that is not Lambda(0)-bounded";
    verdict("schatten_decay", pass, fit.fitted_exponent, fit.predicted->exponent() - cfg_.tolerances.schatten_margin,
            "fitted decay exponent against the predicted 1/p minus the margin");
    const double ratio = retained / s.values.front();
    verdict("compactness_proxy", fit.fitted_exponent > 0.0 && ratio < cfg_.tolerances.compactness_ratio, ratio,
            cfg_.tolerances.compactness_ratio, "positive decay and smallest retained value below ratio * s_1");

    bool multiplicities = false;
    for (const auto& b : blocks) multiplicities = multiplicities || b.multiplicity > 1;
    if (multiplicities && t.expand_multiplicity) {
      const DecayFit collapsed = fit_decay_exponent(leading_block_values(blocks, false));
      const double factor = collapsed.fitted_exponent / fit.fitted_exponent;
      results_["collapsed_fitted_exponent"] = collapsed.fitted_exponent;
      results_["collapse_factor"] = factor;
      const double expected = double(p_.n - 1);
      verdict("multiplicity_collapse_factor", std::abs(factor - expected) <= 0.2 * expected, factor, expected,
              "collapsing multiplicities multiplies the exponent by about n - 1 (within 20%)");
    }
    std::vector<double> expanded = s.values;
    side_file("singular_values.csv", Eigen::Map<const Eigen::VectorXd>(expanded.data(), Index(expanded.size())).cast<Complex>(), false);
  }

  const ExperimentConfig& cfg_;
  ModelProblem p_;
  ReportRecord record_;
  json results_ = json::object();
};

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

bool ReportRecord::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

bool SuiteResult::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.status == "pass"; });
}

std::string json_text(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << "\n";
  return os.str();
}

std::string input_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReportRecord run_task(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  try {
    ReportRecord r = TaskRun(cfg).run();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  } catch (const Error& e) {
    throw Error(e.kind(), "task " + cfg.task.type + " on " + to_string(cfg.problem.kind) + ": " + e.what());
  }
}

void write_report(const ReportRecord& r, const std::filesystem::path& directory, bool write_matrices) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "report.json");
    out << json_text(r.document);
  }
  {
    std::ofstream out(directory / "timing.json");
    out << json_text(json{{"wall_seconds", r.wall_seconds}});
  }
  if (write_matrices)
    for (const auto& f : r.side_files) write_matrix_csv(directory / f.name, f.matrix, f.complex_entries);
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::invalid_config, "cannot read suite manifest " + manifest.string());
  std::vector<std::filesystem::path> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == ';') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::filesystem::path p = line.substr(first, last - first + 1);
    out.push_back(p.is_absolute() ? p : manifest.parent_path() / p);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_config, "suite manifest " + manifest.string() + " lists no configs");
  return out;
}

SuiteResult run_suite(const std::filesystem::path& manifest, const std::filesystem::path& out, int workers) {
  const auto paths = read_manifest(manifest);
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) configs.push_back(load_config(p));

  // One output directory per task, named after the config file.
  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (const auto& p : paths) {
    std::string stem = p.stem().string();
    if (seen[stem]++ > 0) stem += "_" + std::to_string(seen[stem]);
    names.push_back(stem);
  }

  SuiteResult result;
  result.entries.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      SuiteEntry& e = result.entries[i];
      e.config = paths[i];
      e.task = configs[i].task.type;
      try {
        const ReportRecord r = run_task(configs[i]);
        write_report(r, out / names[i], configs[i].output.write_matrices);
        e.status = r.passed() ? "pass" : "fail";
        for (const auto& v : r.verdicts)
          if (!v.passed) e.failed_rules.push_back(v.rule);
        e.summary = r.document["results"];
      } catch (const std::exception& ex) {
        e.status = "error";
        e.message = ex.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(out);
  json rows = json::array();
  std::ofstream csv(out / "summary.csv");
  csv << "config,task,status,failed_rules,formula_count,direct_count,fitted_exponent,predicted_exponent,message\n";
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const SuiteEntry& e = result.entries[i];
    rows.push_back({{"config", names[i]},
                    {"task", e.task},
                    {"status", e.status},
                    {"failed_rules", e.failed_rules},
                    {"message", e.message}});
    auto pick = [&](const char* key) -> std::string {
      const json* j = &e.summary;
      if (j->contains("count")) j = &(*j)["count"];
      if (!j->is_object() || !j->contains(key)) return "";
      const json& v = (*j)[key];
      return v.is_number_float() ? format_double(v.get<double>()) : v.dump();
    };
    std::string failed;
    for (const auto& f : e.failed_rules) failed += (failed.empty() ? "" : ";") + f;
    csv << csv_field(names[i]) << "," << e.task << "," << e.status << "," << csv_field(failed) << ","
        << pick("formula_count") << "," << pick("direct_count") << "," << pick("fitted_exponent") << ","
        << pick("predicted_exponent") << "," << csv_field(e.message) << "\n";
  }
  std::ofstream summary(out / "summary.json");
  summary << json_text(json{{"manifest", manifest.filename().string()}, {"tasks", rows}, {"pass", result.passed()}});
  return result;
}

}  // namespace spectriples
