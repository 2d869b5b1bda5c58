#pragma once

// Running configured experiments and writing their reports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectriples/config.hpp"

namespace spectriples {

struct Verdict {
  std::string rule;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SideFile {
  std::string name;
  MatrixXc matrix;
  bool complex_entries = false;
};

struct ReportRecord {
  nlohmann::json document;  // everything except side files and wall time
  std::vector<Verdict> verdicts;
  std::vector<SideFile> side_files;
  double wall_seconds = 0.0;

  bool passed() const;
};

/// JSON text with doubles at 17 significant digits and sorted keys.
std::string json_text(const nlohmann::json& j);

/// FNV-1a of the canonical config text, as 16 hex digits.
std::string input_hash(const ExperimentConfig& cfg);

ReportRecord run_task(const ExperimentConfig& cfg);

/// report.json, the CSV side files, and timing.json (kept apart so that
/// report.json is reproducible byte for byte).
void write_report(const ReportRecord& r, const std::filesystem::path& directory, bool write_matrices);

struct SuiteEntry {
  std::filesystem::path config;
  std::string task;
  std::string status;  // pass | fail | error
  std::string message;
  std::vector<std::string> failed_rules;
  nlohmann::json summary;  // headline numbers of the task
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  bool passed() const;
};

/// Manifest: one config path per line, relative to the manifest; blank lines
/// and lines starting with '#' or ';' are ignored.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest);

/// Runs every task of the manifest on `workers` threads; each task writes to
/// its own subdirectory of `out`. Writes summary.json and summary.csv.
SuiteResult run_suite(const std::filesystem::path& manifest, const std::filesystem::path& out, int workers);

}  // namespace spectriples
