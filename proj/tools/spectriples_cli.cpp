// Command-line front end: one subcommand per task family, plus `suite`.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spectriples/tasks.hpp"

namespace {

int worker_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SPECTRIPLES_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::logic_error&) {
    }
    std::cerr << "ignoring SPECTRIPLES_WORKERS=" << env << "\n";
  }
  return 1;
}

int run_single(const std::string& task, const std::string& config, const std::string& out) {
  using namespace spectriples;
  const ExperimentConfig cfg = load_config(config);
  if (cfg.task.type != task)
    throw Error(ErrorKind::invalid_config,
                "config " + config + " describes task '" + cfg.task.type + "', not '" + task + "'");
  const ReportRecord r = run_task(cfg);
  const std::filesystem::path dir = out.empty() ? cfg.output.directory : out;
  write_report(r, dir, cfg.output.write_matrices);
  for (const auto& v : r.verdicts)
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.rule << "  value=" << v.value << " threshold=" << v.threshold
              << "\n";
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return r.passed() ? 0 : 1;
}

int run_suite_command(const std::string& manifest, const std::string& out, int workers) {
  using namespace spectriples;
  const SuiteResult s = run_suite(manifest, out.empty() ? "out" : out, workers);
  for (const auto& e : s.entries) {
    std::cout << e.status << "  " << e.config.filename().string() << "  (" << e.task << ")";
    for (const auto& f : e.failed_rules) std::cout << "  failed: " << f;
    if (!e.message.empty()) std::cout << "  " << e.message;
    std::cout << "\n";
  }
  return s.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary triples, Weyl functions and spectral counts for model elliptic problems"};
  app.require_subcommand(1);
  std::string config, out;
  int workers = 0;
  app.add_option("--config", config, "config file (suite: manifest listing config files)")->required();
  app.add_option("--out", out, "output directory (default: [output] directory)");
  app.add_option("--workers", workers, "worker threads for suites (env SPECTRIPLES_WORKERS)")->check(CLI::PositiveNumber);
  app.fallthrough();

  const char* tasks[][2] = {
      {"green-check", "discrete Green identity residual"},
      {"calderon", "Calderon operator Lambda(z)"},
      {"weyl", "Weyl function M(z) and its Herglotz and monotonicity checks"},
      {"count", "negative eigenvalues of A_K: boundary formula against dense count"},
      {"gaps", "spectral gaps of the Dirichlet realization"},
      {"gap-count", "eigenvalues of A_K in a gap: boundary formula against dense count"},
      {"schatten", "singular-value decay of a resolvent-power difference"},
      {"suite", "run every config listed in a manifest"},
  };
  for (const auto& t : tasks) app.add_subcommand(t[0], t[1]);

  CLI11_PARSE(app, argc, argv);
  const std::string task = app.get_subcommands().front()->get_name();
  try {
    if (task == "suite") return run_suite_command(config, out, worker_count(workers));
    return run_single(task, config, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
