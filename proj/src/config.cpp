#include "spectriples/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace spectriples {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem",
       {"kind", "nodes", "length", "truncation", "r_inner", "r_outer", "k_max", "l_max", "potential",
        "value", "depth", "width", "center", "amplitude", "shift", "samples", "spectral_shift"}},
      {"k", {"type", "sigma", "multiplier", "coefficient", "exponent", "offset", "samples", "matrix"}},
      {"task",
       {"type", "z", "power", "class", "tail_fraction", "drop_head", "expand_multiplicity", "window",
        "min_width", "gap", "epsilon_fraction", "buffer_steps", "lambda_root_convention", "probe",
        "refinements", "seed"}},
      {"tolerances",
       {"hermitian", "green_relative", "green_slope", "schatten_margin", "compactness_ratio",
        "finite_rank"}},
      {"output", {"directory", "write_matrices"}},
  };
  return keys;
}

const std::set<std::string>& task_types() {
  static const std::set<std::string> t = {"green-check", "calderon", "weyl",    "count",
                                          "gaps",        "gap-count", "schatten"};
  return t;
}

// Geometry keys each problem kind accepts.
std::set<std::string> geometry_keys(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::interval_m1:
    case ProblemKind::interval_m2: return {"length"};
    case ProblemKind::halfline_m1: return {"truncation"};
    case ProblemKind::annulus_m1: return {"r_inner", "r_outer", "k_max"};
    case ProblemKind::ball_exterior_m1: return {"r_inner", "truncation", "l_max"};
  }
  return {};
}

std::set<std::string> required_geometry(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::interval_m1:
    case ProblemKind::interval_m2: return {"length"};
    case ProblemKind::halfline_m1: return {"truncation"};
    case ProblemKind::annulus_m1: return {"r_outer", "k_max"};
    case ProblemKind::ball_exterior_m1: return {"truncation", "l_max"};
  }
  return {};
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::invalid_value, "'" + key + "': " + why);
}

// shortest text that reads back to the same double
std::string fmt(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt(Complex z) { return fmt(z.real()) + "," + fmt(z.imag()); }

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string raw(const std::string& key) const {
    if (!has(key)) throw Error(ErrorKind::missing_key, "'" + qualified(key) + "'");
    return boost::algorithm::trim_copy(tree_->get<std::string>(key));
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  double number(const std::string& key) const { return to_number(raw(key), qualified(key)); }

  long integer(const std::string& key) const {
    const double x = number(key);
    if (x != std::floor(x) || std::abs(x) > 1e15) invalid(qualified(key), "expected an integer");
    return static_cast<long>(x);
  }

  bool boolean(const std::string& key) const {
    const std::string v = boost::algorithm::to_lower_copy(raw(key));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    invalid(qualified(key), "expected true or false");
  }

  Complex complex(const std::string& key) const {
    const auto parts = split(raw(key), ",");
    if (parts.empty() || parts.size() > 2) invalid(qualified(key), "expected 're' or 're,im'");
    return {to_number(parts[0], qualified(key)), parts.size() == 2 ? to_number(parts[1], qualified(key)) : 0.0};
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& p : split(raw(key), ",")) out.push_back(to_number(p, qualified(key)));
    if (out.empty()) invalid(qualified(key), "expected a comma-separated list");
    return out;
  }

  std::vector<Complex> complexes(const std::string& key) const {
    std::vector<Complex> out;
    for (const auto& item : split(raw(key), ";")) {
      const auto parts = split(item, ",");
      if (parts.empty() || parts.size() > 2) invalid(qualified(key), "expected 're,im; re,im; ...'");
      out.emplace_back(to_number(parts[0], qualified(key)),
                       parts.size() == 2 ? to_number(parts[1], qualified(key)) : 0.0);
    }
    if (out.empty()) invalid(qualified(key), "expected at least one value");
    return out;
  }

 private:
  static std::vector<std::string> split(const std::string& text, const char* sep) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(sep));
    for (auto& p : parts) boost::algorithm::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    return parts;
  }

  static double to_number(const std::string& text, const std::string& key) {
    try {
      std::size_t used = 0;
      const double x = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(x)) invalid(key, "not a finite number: '" + text + "'");
      return x;
    } catch (const std::logic_error&) {
      invalid(key, "not a number: '" + text + "'");
    }
  }

  std::string name_;
  const pt::ptree* tree_;
};

ProblemConfig parse_problem(const Section& s) {
  ProblemConfig c;
  try {
    c.kind = problem_kind_from_string(s.raw("kind"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::missing_key) throw;
    invalid("problem.kind", "unknown problem kind '" + s.raw("kind") + "'");
  }
  const long nodes = s.integer("nodes");
  if (nodes < 1) invalid("problem.nodes", "must be positive");
  c.nodes = nodes;

  const auto accepted = geometry_keys(c.kind);
  for (const char* key : {"length", "truncation", "r_inner", "r_outer", "k_max", "l_max"})
    if (s.has(key) && !accepted.count(key))
      invalid(s.qualified(key), std::string("not used by kind ") + to_string(c.kind));
  for (const auto& key : required_geometry(c.kind)) s.raw(key);

  if (s.has("length")) c.length = s.number("length");
  if (s.has("truncation")) c.truncation = s.number("truncation");
  if (s.has("r_inner")) c.r_inner = s.number("r_inner");
  if (s.has("r_outer")) c.r_outer = s.number("r_outer");
  if (s.has("k_max")) c.k_max = static_cast<int>(s.integer("k_max"));
  if (s.has("l_max")) c.l_max = static_cast<int>(s.integer("l_max"));

  c.potential = s.raw("potential");
  static const std::set<std::string> presets = {"constant", "well", "mathieu", "tabulated"};
  if (!presets.count(c.potential)) invalid("problem.potential", "unknown preset '" + c.potential + "'");
  if (s.has("value")) c.value = s.number("value");
  if (s.has("depth")) c.depth = s.number("depth");
  if (s.has("width")) c.width = s.number("width");
  if (s.has("center")) c.center = s.number("center");
  if (s.has("amplitude")) c.amplitude = s.number("amplitude");
  if (s.has("shift")) c.shift = s.number("shift");
  if (c.potential == "tabulated") c.samples = s.numbers("samples");
  else if (s.has("samples")) invalid("problem.samples", "only used by the tabulated potential");
  if (s.has("spectral_shift")) c.spectral_shift = s.number("spectral_shift");
  return c;
}

KConfig parse_k(const Section& s) {
  KConfig c;
  if (s.has("type")) c.type = s.raw("type");
  static const std::map<std::string, std::set<std::string>> used = {
      {"none", {}},
      {"scalar", {"sigma"}},
      {"multiplier", {"multiplier", "coefficient", "exponent", "offset"}},
      {"angular", {"samples"}},
      {"dense", {"matrix"}},
  };
  const auto it = used.find(c.type);
  if (it == used.end()) invalid("k.type", "unknown K type '" + c.type + "'");
  for (const auto& key : schema().at("k"))
    if (key != "type" && s.has(key) && !it->second.count(key))
      invalid(s.qualified(key), "not used by K type " + c.type);

  if (c.type == "scalar") c.sigma = s.complex("sigma");
  if (c.type == "multiplier") {
    if (s.raw("multiplier") != "power")
      invalid("k.multiplier", "unknown multiplier '" + s.raw("multiplier") + "' (known: power)");
    if (s.has("coefficient")) c.coefficient = s.number("coefficient");
    if (s.has("exponent")) c.exponent = s.number("exponent");
    if (s.has("offset")) c.offset = s.number("offset");
  }
  if (c.type == "angular") c.samples = s.numbers("samples");
  if (c.type == "dense") c.matrix = s.raw("matrix");
  return c;
}

TaskConfig parse_task(const Section& s) {
  TaskConfig c;
  c.type = s.raw("type");
  if (!task_types().count(c.type)) invalid("task.type", "unknown task '" + c.type + "'");
  if (s.has("z")) c.z = s.complexes("z");
  if (s.has("power")) {
    const long l = s.integer("power");
    if (l < 1 || l > 3) invalid("task.power", "must be 1, 2 or 3");
    c.power = static_cast<int>(l);
  }
  if (s.has("class")) {
    c.schatten_class = s.raw("class");
    try {
      schatten_class_from_string(c.schatten_class);
    } catch (const Error&) {
      invalid("task.class", "unknown class '" + c.schatten_class + "'");
    }
  }
  if (s.has("tail_fraction")) {
    c.tail_fraction = s.number("tail_fraction");
    if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0)) invalid("task.tail_fraction", "must lie in (0, 1]");
  }
  if (s.has("drop_head")) {
    const long d = s.integer("drop_head");
    if (d < 0) invalid("task.drop_head", "must be nonnegative");
    c.drop_head = d;
  }
  if (s.has("expand_multiplicity")) c.expand_multiplicity = s.boolean("expand_multiplicity");
  if (s.has("window")) {
    const auto w = s.numbers("window");
    if (w.size() != 2 || !(w[0] < w[1])) invalid("task.window", "expected 'lower, upper' with lower < upper");
    c.window_lower = w[0];
    c.window_upper = w[1];
  }
  if (s.has("min_width")) {
    c.min_width = s.number("min_width");
    if (c.min_width < 0.0) invalid("task.min_width", "must be nonnegative");
  }
  if (s.has("gap")) {
    const long g = s.integer("gap");
    if (g < 1) invalid("task.gap", "gaps are numbered from 1");
    c.gap = static_cast<int>(g);
  }
  if (s.has("epsilon_fraction")) {
    c.epsilon_fraction = s.numbers("epsilon_fraction");
    for (double e : c.epsilon_fraction)
      if (!(e > 0.0 && e < 1.0)) invalid("task.epsilon_fraction", "entries must lie in (0, 1)");
  }
  if (s.has("buffer_steps")) {
    const long b = s.integer("buffer_steps");
    if (b < 0) invalid("task.buffer_steps", "must be nonnegative");
    c.buffer_steps = static_cast<int>(b);
  }
  if (s.has("lambda_root_convention")) {
    c.lambda_root_convention = s.raw("lambda_root_convention");
    try {
      root_convention_from_string(c.lambda_root_convention);
    } catch (const Error&) {
      invalid("task.lambda_root_convention", "expected negative_root or as_written");
    }
  }
  if (s.has("probe")) {
    c.probe = s.raw("probe");
    if (c.probe != "compact" && c.probe != "smooth") invalid("task.probe", "expected compact or smooth");
  }
  if (s.has("refinements")) {
    for (double n : s.numbers("refinements")) {
      if (n != std::floor(n) || n < 1) invalid("task.refinements", "expected positive node counts");
      c.refinements.push_back(static_cast<Index>(n));
    }
  }
  if (s.has("seed")) {
    const long seed = s.integer("seed");
    if (seed < 0) invalid("task.seed", "must be nonnegative");
    c.seed = static_cast<unsigned long>(seed);
  }
  return c;
}

Tolerances parse_tolerances(const Section& s) {
  Tolerances t;
  auto positive = [&](const char* key, double& slot) {
    if (!s.has(key)) return;
    slot = s.number(key);
    if (!(slot > 0.0)) invalid(s.qualified(key), "must be positive");
  };
  positive("hermitian", t.hermitian);
  positive("green_relative", t.green_relative);
  if (s.has("green_slope")) t.green_slope = s.number("green_slope");
  if (s.has("schatten_margin")) {
    t.schatten_margin = s.number("schatten_margin");
    if (t.schatten_margin < 0.0) invalid("tolerances.schatten_margin", "must be nonnegative");
  }
  positive("compactness_ratio", t.compactness_ratio);
  positive("finite_rank", t.finite_rank);
  return t;
}

OutputConfig parse_output(const Section& s) {
  OutputConfig o;
  if (s.has("directory")) o.directory = s.raw("directory");
  if (s.has("write_matrices")) o.write_matrices = s.boolean("write_matrices");
  return o;
}

Potential shifted_potential(const ProblemConfig& c) {
  const double d = c.spectral_shift;
  if (c.potential == "constant") return Potential::constant(c.value + d);
  if (c.potential == "well") return Potential::well(c.value + d, c.depth, c.width, c.center);
  if (c.potential == "mathieu") return Potential::mathieu(c.amplitude, c.shift + d);
  std::vector<double> samples = c.samples;
  for (double& v : samples) v += d;
  const double start = c.kind == ProblemKind::annulus_m1 || c.kind == ProblemKind::ball_exterior_m1 ? c.r_inner : 0.0;
  double end = c.length;
  if (c.kind == ProblemKind::halfline_m1 || c.kind == ProblemKind::ball_exterior_m1) end = c.truncation;
  if (c.kind == ProblemKind::annulus_m1) end = c.r_outer;
  return Potential::tabulated(std::move(samples), start, end);
}

template <typename T>
std::string join(const std::vector<T>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_same_v<T, Complex>) out += fmt(v[i]);
    else if constexpr (std::is_integral_v<T>) out += std::to_string(v[i]);
    else out += fmt(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_directory) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::invalid_config, std::string("malformed config: ") + e.message() +
                                               " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, section] : tree) {
    const auto known = schema().find(name);
    if (known == schema().end()) {
      if (section.empty()) throw Error(ErrorKind::unknown_key, "'" + name + "' (keys belong in a section)");
      throw Error(ErrorKind::unknown_key, "'" + name + "' (unknown section)");
    }
    for (const auto& [key, value] : section) {
      (void)value;
      if (!known->second.count(key)) throw Error(ErrorKind::unknown_key, "'" + key + "' in [" + name + "]");
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };
  ExperimentConfig cfg;
  cfg.problem = parse_problem(section("problem"));
  cfg.k = parse_k(section("k"));
  cfg.task = parse_task(section("task"));
  cfg.tolerances = parse_tolerances(section("tolerances"));
  cfg.output = parse_output(section("output"));
  cfg.base_directory = base_directory;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_config, "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const ProblemConfig& p = cfg.problem;
  os << "[problem]\n";
  os << "kind = " << to_string(p.kind) << "\n";
  os << "nodes = " << p.nodes << "\n";
  const auto geometry = geometry_keys(p.kind);
  if (geometry.count("length")) os << "length = " << fmt(p.length) << "\n";
  if (geometry.count("r_inner")) os << "r_inner = " << fmt(p.r_inner) << "\n";
  if (geometry.count("r_outer")) os << "r_outer = " << fmt(p.r_outer) << "\n";
  if (geometry.count("truncation")) os << "truncation = " << fmt(p.truncation) << "\n";
  if (geometry.count("k_max")) os << "k_max = " << p.k_max << "\n";
  if (geometry.count("l_max")) os << "l_max = " << p.l_max << "\n";
  os << "potential = " << p.potential << "\n";
  os << "value = " << fmt(p.value) << "\n";
  os << "depth = " << fmt(p.depth) << "\n";
  os << "width = " << fmt(p.width) << "\n";
  os << "center = " << fmt(p.center) << "\n";
  os << "amplitude = " << fmt(p.amplitude) << "\n";
  os << "shift = " << fmt(p.shift) << "\n";
  if (p.potential == "tabulated") os << "samples = " << join(p.samples, ", ") << "\n";
  os << "spectral_shift = " << fmt(p.spectral_shift) << "\n";

  const KConfig& k = cfg.k;
  os << "\n[k]\ntype = " << k.type << "\n";
  if (k.type == "scalar") os << "sigma = " << fmt(k.sigma) << "\n";
  if (k.type == "multiplier")
    os << "multiplier = power\ncoefficient = " << fmt(k.coefficient) << "\nexponent = " << fmt(k.exponent)
       << "\noffset = " << fmt(k.offset) << "\n";
  if (k.type == "angular") os << "samples = " << join(k.samples, ", ") << "\n";
  if (k.type == "dense") os << "matrix = " << k.matrix << "\n";

  const TaskConfig& t = cfg.task;
  os << "\n[task]\ntype = " << t.type << "\n";
  if (!t.z.empty()) os << "z = " << join(t.z, "; ") << "\n";
  os << "power = " << t.power << "\n";
  os << "class = " << t.schatten_class << "\n";
  os << "tail_fraction = " << fmt(t.tail_fraction) << "\n";
  if (t.drop_head) os << "drop_head = " << *t.drop_head << "\n";
  os << "expand_multiplicity = " << (t.expand_multiplicity ? "true" : "false") << "\n";
  os << "window = " << fmt(t.window_lower) << ", " << fmt(t.window_upper) << "\n";
  os << "min_width = " << fmt(t.min_width) << "\n";
  os << "gap = " << t.gap << "\n";
  os << "epsilon_fraction = " << join(t.epsilon_fraction, ", ") << "\n";
  os << "buffer_steps = " << t.buffer_steps << "\n";
  os << "lambda_root_convention = " << t.lambda_root_convention << "\n";
  os << "probe = " << t.probe << "\n";
  if (!t.refinements.empty()) os << "refinements = " << join(t.refinements, ", ") << "\n";
  os << "seed = " << t.seed << "\n";

  const Tolerances& tol = cfg.tolerances;
  os << "\n[tolerances]\n";
  os << "hermitian = " << fmt(tol.hermitian) << "\n";
  os << "green_relative = " << fmt(tol.green_relative) << "\n";
  if (tol.green_slope) os << "green_slope = " << fmt(*tol.green_slope) << "\n";
  os << "schatten_margin = " << fmt(tol.schatten_margin) << "\n";
  os << "compactness_ratio = " << fmt(tol.compactness_ratio) << "\n";
  os << "finite_rank = " << fmt(tol.finite_rank) << "\n";

  os << "\n[output]\ndirectory = " << cfg.output.directory << "\n";
  os << "write_matrices = " << (cfg.output.write_matrices ? "true" : "false") << "\n";
  return os.str();
}

ModelProblem build_problem(const ProblemConfig& c) {
  const Potential q = shifted_potential(c);
  switch (c.kind) {
    case ProblemKind::interval_m1: return build_interval_m1(c.length, c.nodes, q);
    case ProblemKind::halfline_m1: return build_halfline_m1(c.truncation, c.nodes, q);
    case ProblemKind::interval_m2: return build_interval_m2(c.length, c.nodes, q);
    case ProblemKind::annulus_m1: return build_annulus_m1(c.r_inner, c.r_outer, c.nodes, c.k_max, q);
    case ProblemKind::ball_exterior_m1:
      return build_ball_exterior_m1(c.r_inner, c.truncation, c.nodes, c.l_max, q);
  }
  throw Error(ErrorKind::invalid_config, "unknown problem kind");
}

KSpec build_k(const KConfig& c, const ModelProblem& p, const std::filesystem::path& base) {
  (void)p;
  if (c.type == "none") return KSpec::constant(0.0);
  if (c.type == "scalar") return KSpec::constant(c.sigma);
  if (c.type == "multiplier") {
    const double a = c.coefficient, e = c.exponent, d = c.offset;
    return KSpec::mode_multiplier(
        [a, e, d](int mode) { return Complex(a * std::pow(std::abs(double(mode)), e) + d, 0.0); },
        "power(coefficient=" + fmt(a) + ",exponent=" + fmt(e) + ",offset=" + fmt(d) + ")");
  }
  if (c.type == "angular") {
    std::vector<Complex> samples(c.samples.begin(), c.samples.end());
    return KSpec::angular_function(std::move(samples));
  }
  const std::filesystem::path given(c.matrix);
  const std::filesystem::path path = given.is_absolute() ? given : base / given;
  return KSpec::dense_matrix(read_matrix_csv(path));
}

MatrixXc read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_config, "cannot read matrix file " + path.string());
  std::string line;
  auto fields = [](const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
    for (auto& p : parts) boost::algorithm::trim(p);
    return parts;
  };
  if (!std::getline(in, line)) throw Error(ErrorKind::invalid_value, path.string() + ": empty matrix file");
  const auto header = fields(line);
  Index rows = 0, cols = 0;
  bool complex_entries = false;
  try {
    if (header.size() != 3) throw std::invalid_argument("header");
    rows = std::stol(header[0]);
    cols = std::stol(header[1]);
    complex_entries = std::stoi(header[2]) != 0;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::invalid_value, path.string() + ": header must read 'rows,cols,complex'");
  }
  if (rows < 0 || cols < 0) throw Error(ErrorKind::invalid_value, path.string() + ": negative shape");
  MatrixXc m(rows, cols);
  for (Index i = 0; i < rows * cols; ++i) {
    if (!std::getline(in, line))
      throw Error(ErrorKind::invalid_value, path.string() + ": expected " + std::to_string(rows * cols) + " entries");
    const auto parts = fields(line);
    try {
      if (parts.size() != (complex_entries ? 2u : 1u)) throw std::invalid_argument("entry");
      m(i / cols, i % cols) = Complex(std::stod(parts[0]), complex_entries ? std::stod(parts[1]) : 0.0);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::invalid_value, path.string() + ": bad entry on line " + std::to_string(i + 2));
    }
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixXc& m, bool complex_entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_config, "cannot write " + path.string());
  out << m.rows() << "," << m.cols() << "," << (complex_entries ? 1 : 0) << "\n";
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out << (complex_entries ? fmt(m(i, j)) : fmt(m(i, j).real())) << "\n";
}

void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& v) {
  MatrixXc m(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Index>(i), 0) = v[i];
  write_matrix_csv(path, m, false);
}

}  // namespace spectriples
