#pragma once

// Experiment configuration and the output documents produced by the
// synthesize / simulate / montecarlo commands.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sppc/lifting.hpp"
#include "sppc/netsim.hpp"
#include "sppc/plant.hpp"
#include "sppc/synthesis.hpp"

namespace sppc {

enum class SolverChoice { Omp, L1, Both };

std::string_view to_string(SolverChoice s) noexcept;
SolverChoice solver_choice_from_string(std::string_view s);

struct ExperimentConfig {
  // Exactly one of (A, B) or poles.
  std::optional<Matrix> A;
  std::optional<Vector> B;
  std::optional<std::vector<std::complex<double>>> poles;

  int N = 10;
  std::optional<Matrix> Q;  // nullopt = identity
  double alpha = 0.5;
  CInterpretation c_interpretation = CInterpretation::ColumnLift;
  SolverChoice solver = SolverChoice::Omp;
  double lambda = 1.0;
  OmpSelection omp_selection = OmpSelection::Normalized;
  std::optional<Vector> x0;  // nullopt = ones(n) / sqrt(n)
  double p_drop = 0.5;
  int steps = 100;
  int trials = 500;
  std::uint64_t seed = 1;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Parses a JSON document. Throws Error(Config) on malformed input, unknown
/// keys, or out-of-range values.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (two-space indent). x0 and Q are written only when set.
std::string serialize_config(const ExperimentConfig& cfg);

/// Config with x0 made explicit.
ExperimentConfig resolved(const ExperimentConfig& cfg);

/// Everything derived from a config before any simulation runs.
struct Experiment {
  ExperimentConfig config;  // resolved
  PlantModel plant;
  Matrix Q;
  Vector x0;
  SynthesisResult synthesis;
  HorizonData horizon;
};

Experiment build_experiment(const ExperimentConfig& cfg);

LoopSettings loop_settings(const ExperimentConfig& cfg, SolverKind solver);
std::vector<SolverKind> solvers_of(SolverChoice choice);

struct Manifest {
  std::string json;
  bool ok = false;
};

Manifest synthesis_manifest(const Experiment& exp);

inline constexpr std::string_view kTraceHeader = "k,norm_x,l0_u,dropped,input,design_time_us";

std::string trace_csv(const SimTrace& trace);

/// File name -> CSV text. `trace.csv` holds OMP (or l1 when it is the only
/// solver); with solver = both the l1 loop goes to `trace_l1.csv`.
std::vector<std::pair<std::string, std::string>> simulate_outputs(const Experiment& exp);

struct MonteCarloOutputs {
  std::vector<std::pair<SolverKind, MonteCarloResult>> results;
  std::string aggregate_csv;
  std::string summary_json;
};

MonteCarloOutputs montecarlo_outputs(const Experiment& exp, int threads = 1);

struct DecayFit {
  std::optional<double> slope;  // d/dk log(mean |x(k)|); nullopt if < 2 usable points
  int first_k = -1;
  int last_k = -1;
  bool reached_zero = false;
};

/// Least-squares slope of log(curve[k]) over the final half of the horizon.
/// Entries that are exactly zero cannot be logged and are skipped; if fewer
/// than two positive entries remain there, the fit uses every positive entry.
DecayFit log_decay_fit(const std::vector<double>& curve);

/// printf("%.17g") rendering used for every CSV number.
std::string format_real(double v);

}  // namespace sppc
