// sppc: command-line front end for sparse packetized predictive control.
//
//   sppc synthesize --config exp.json --out dir   -> dir/manifest.json
//   sppc simulate   --config exp.json --out dir   -> dir/trace.csv [dir/trace_l1.csv]
//   sppc montecarlo --config exp.json --out dir   -> dir/aggregate.csv, dir/summary.json
//
// Exit codes: 0 success, 1 config error, 2 numeric/synthesis failure,
// 3 simulation contract violation.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "sppc/sppc.h"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> solver;
  int threads = 1;
};

class CliError {
 public:
  CliError(int code, std::string message) : code_(code), message_(std::move(message)) {}
  int code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  int code_;
  std::string message_;
};

void check(sppc_status st) {
  if (st == SPPC_OK) return;
  // Argument and internal failures are reported as numeric failures.
  const int code = st <= SPPC_ERROR_SIMULATION ? static_cast<int>(st) : 2;
  throw CliError(code, sppc_last_error());
}

struct StringDeleter {
  void operator()(char* s) const { sppc_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ExperimentDeleter {
  void operator()(sppc_experiment* e) const { sppc_experiment_destroy(e); }
};
struct TraceDeleter {
  void operator()(sppc_trace* t) const { sppc_trace_destroy(t); }
};
struct MonteCarloDeleter {
  void operator()(sppc_montecarlo* m) const { sppc_montecarlo_destroy(m); }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw CliError(1, "cannot write " + path.string());
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::unique_ptr<sppc_experiment, ExperimentDeleter> open_experiment(const Options& opt) {
  sppc_experiment* raw = nullptr;
  check(sppc_experiment_load(opt.config.c_str(), &raw));
  std::unique_ptr<sppc_experiment, ExperimentDeleter> exp(raw);
  if (opt.seed) check(sppc_experiment_set_seed(exp.get(), *opt.seed));
  if (opt.trials) check(sppc_experiment_set_trials(exp.get(), *opt.trials));
  if (opt.solver) check(sppc_experiment_set_solver(exp.get(), opt.solver->c_str()));
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw CliError(1, "cannot create output directory " + opt.out + ": " + ec.message());
  return exp;
}

int cmd_synthesize(const Options& opt) {
  auto exp = open_experiment(opt);
  char* raw = nullptr;
  int ok = 0;
  check(sppc_experiment_synthesize(exp.get(), &raw, &ok));
  OwnedString manifest(raw);
  write_file(fs::path(opt.out) / "manifest.json", std::string(manifest.get()) + "\n");
  if (!ok) throw CliError(2, "synthesis invariant checks failed; see manifest.json");
  return 0;
}

int cmd_simulate(const Options& opt) {
  auto exp = open_experiment(opt);
  int uses_omp = 0, uses_l1 = 0;
  check(sppc_experiment_uses_solver(exp.get(), SPPC_SOLVER_OMP, &uses_omp));
  check(sppc_experiment_uses_solver(exp.get(), SPPC_SOLVER_L1, &uses_l1));
  bool first = true;
  for (auto [solver, used] : {std::pair{SPPC_SOLVER_OMP, uses_omp}, std::pair{SPPC_SOLVER_L1, uses_l1}}) {
    if (!used) continue;
    sppc_trace* raw = nullptr;
    check(sppc_experiment_simulate(exp.get(), solver, &raw));
    std::unique_ptr<sppc_trace, TraceDeleter> trace(raw);
    char* csv = nullptr;
    check(sppc_trace_csv(trace.get(), &csv));
    OwnedString text(csv);
    write_file(fs::path(opt.out) / (first ? "trace.csv" : "trace_l1.csv"), text.get());
    first = false;
  }
  return 0;
}

int cmd_montecarlo(const Options& opt) {
  auto exp = open_experiment(opt);
  sppc_montecarlo* raw = nullptr;
  check(sppc_experiment_montecarlo(exp.get(), opt.threads, &raw));
  std::unique_ptr<sppc_montecarlo, MonteCarloDeleter> mc(raw);
  char* csv = nullptr;
  check(sppc_montecarlo_aggregate_csv(mc.get(), &csv));
  OwnedString agg(csv);
  char* json = nullptr;
  check(sppc_montecarlo_summary_json(mc.get(), &json));
  OwnedString summary(json);
  write_file(fs::path(opt.out) / "aggregate.csv", agg.get());
  write_file(fs::path(opt.out) / "summary.json", std::string(summary.get()) + "\n");
  return 0;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "Experiment configuration (JSON)")->required();
  sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", opt.seed, "Override the config seed");
  sub->add_option("--trials", opt.trials, "Override the number of Monte Carlo trials");
  sub->add_option("--solver", opt.solver, "Override the solver: omp, l1 or both");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse packetized predictive control over erasure channels"};
  app.set_version_flag("--version", std::string(sppc_version()));
  app.require_subcommand(1);

  Options opt;
  auto* syn = app.add_subcommand("synthesize", "Compute P, rho, c, Eps, W and write manifest.json");
  auto* sim = app.add_subcommand("simulate", "Run one closed-loop trial and write trace.csv");
  auto* mc = app.add_subcommand("montecarlo", "Run a batch of trials and write aggregate.csv and summary.json");
  for (auto* sub : {syn, sim, mc}) add_common(sub, opt);
  mc->add_option("--threads", opt.threads, "Worker threads (output does not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*syn) return cmd_synthesize(opt);
    if (*sim) return cmd_simulate(opt);
    return cmd_montecarlo(opt);
  } catch (const CliError& e) {
    std::cerr << "{\"error\": {\"exit_code\": " << e.code() << ", \"message\": \""
              << json_escape(e.message()) << "\"}}\n";
    return e.code();
  }
}
