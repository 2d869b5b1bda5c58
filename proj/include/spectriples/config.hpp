#pragma once

// Experiment configuration: a sectioned key = value text file.
//
//   [problem]     kind, nodes, geometry, potential preset and parameters
//   [k]           boundary operator K
//   [task]        what to run and its parameters
//   [tolerances]  verdict thresholds
//   [output]      where reports go
//
// Unknown keys are rejected; every error names the key at fault.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spectriples/counting.hpp"
#include "spectriples/problems.hpp"
#include "spectriples/schatten.hpp"

namespace spectriples {

struct ProblemConfig {
  ProblemKind kind = ProblemKind::halfline_m1;
  Index nodes = 0;
  double length = 1.0;      // interval_m1, interval_m2
  double truncation = 40.0; // halfline_m1, ball_exterior_m1
  double r_inner = 1.0;     // annulus_m1, ball_exterior_m1
  double r_outer = 2.0;     // annulus_m1
  int k_max = 0;            // annulus_m1
  int l_max = 0;            // ball_exterior_m1
  std::string potential = "constant";
  double value = 1.0;       // constant level, or the base of a well
  double depth = 0.0;
  double width = 1.0;
  double center = 0.0;
  double amplitude = 2.0;
  double shift = 3.0;
  std::vector<double> samples;
  double spectral_shift = 0.0;  // added to q everywhere

  bool operator==(const ProblemConfig&) const = default;
};

struct KConfig {
  std::string type = "none";  // none | scalar | multiplier | angular | dense
  Complex sigma{0.0, 0.0};
  // multiplier f(mode) = coefficient * |mode|^exponent + offset
  double coefficient = 1.0;
  double exponent = 0.5;
  double offset = 0.0;
  std::vector<double> samples;  // angular: sigma(2 pi j / M)
  std::string matrix;           // dense: CSV path, relative to the config file

  bool operator==(const KConfig&) const = default;
};

struct TaskConfig {
  std::string type;  // green-check | calderon | weyl | count | gaps | gap-count | schatten
  std::vector<Complex> z;
  int power = 1;
  std::string schatten_class = "elliptic";
  double tail_fraction = 1.0;
  std::optional<Index> drop_head;  // default: first 10% of the list
  bool expand_multiplicity = true;
  double window_lower = 0.0;
  double window_upper = 10.0;
  double min_width = 0.1;
  int gap = 1;  // 1-based
  std::vector<double> epsilon_fraction{0.02};
  int buffer_steps = 0;  // 0 skips the left-edge scan
  std::string lambda_root_convention = "negative_root";
  std::string probe = "compact";  // compact | smooth
  std::vector<Index> refinements;  // node counts for the smooth probe
  unsigned long seed = 20240611;

  bool operator==(const TaskConfig&) const = default;
};

struct Tolerances {
  double hermitian = 1e-8;
  double green_relative = 1e-12;
  std::optional<double> green_slope;  // default 1.8 for m = 1, 0.8 for m = 2
  double schatten_margin = 0.15;
  double compactness_ratio = 1e-3;
  double finite_rank = 1e-10;

  bool operator==(const Tolerances&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool write_matrices = true;

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  KConfig k;
  TaskConfig task;
  Tolerances tolerances;
  OutputConfig output;
  std::filesystem::path base_directory;  // resolves relative paths; not serialized

  bool operator==(const ExperimentConfig& o) const {
    return problem == o.problem && k == o.k && task == o.task && tolerances == o.tolerances &&
           output == o.output;
  }
};

ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_directory = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text: every key written, fixed order, shortest round-trip numbers.
std::string serialize_config(const ExperimentConfig& cfg);

ModelProblem build_problem(const ProblemConfig& cfg);
KSpec build_k(const KConfig& cfg, const ModelProblem& p, const std::filesystem::path& base);

/// Matrix CSV: first line `rows,cols,complex` (e.g. `4,4,1`), then one entry
/// per line in row-major order, written `re` or `re,im`.
MatrixXc read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const MatrixXc& m, bool complex_entries);
void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& v);

}  // namespace spectriples
