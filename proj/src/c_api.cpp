#include "sppc/sppc.h"

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "sppc/errors.hpp"
#include "sppc/experiment.hpp"
#include "sppc/lifting.hpp"
#include "sppc/netsim.hpp"
#include "sppc/plant.hpp"
#include "sppc/solvers.hpp"
#include "sppc/synthesis.hpp"

struct sppc_plant {
  sppc::PlantModel model;
};

struct sppc_controller {
  sppc::PlantModel plant;
  sppc::SynthesisResult synthesis;
  sppc::HorizonData horizon;
};

struct sppc_experiment {
  sppc::ExperimentConfig config;
  std::optional<sppc::Experiment> built;  // synthesis cache; cleared on overrides

  const sppc::Experiment& get() {
    if (!built) built.emplace(sppc::build_experiment(config));
    return *built;
  }
};

struct sppc_trace {
  sppc::SimTrace trace;
};

struct sppc_montecarlo {
  sppc::MonteCarloOutputs outputs;
};

namespace {

thread_local std::string last_error;

class ArgumentError : public std::exception {
 public:
  explicit ArgumentError(const char* what) : what_(what) {}
  const char* what() const noexcept override { return what_; }

 private:
  const char* what_;
};

template <class T>
T& deref(T* p, const char* name) {
  if (p == nullptr) throw ArgumentError(name);
  return *p;
}

template <class F>
sppc_status try_(F&& f) {
  try {
    f();
    last_error.clear();
    return SPPC_OK;
  } catch (const sppc::Error& e) {
    last_error = std::string(sppc::to_string(e.code())) + ": " + e.what();
    return static_cast<sppc_status>(static_cast<int>(e.category()));
  } catch (const ArgumentError& e) {
    last_error = std::string("null or invalid argument: ") + e.what();
    return SPPC_ERROR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SPPC_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SPPC_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SPPC_ERROR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sppc::Matrix read_matrix(const double* data, std::size_t rows, std::size_t cols, const char* name) {
  if (data == nullptr) throw ArgumentError(name);
  sppc::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * cols + c];
  return m;
}

void write_matrix(const sppc::Matrix& m, double* out) {
  if (out == nullptr) return;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
}

sppc::SolverKind solver_kind(sppc_solver s) {
  switch (s) {
    case SPPC_SOLVER_OMP: return sppc::SolverKind::Omp;
    case SPPC_SOLVER_L1: return sppc::SolverKind::L1;
  }
  throw ArgumentError("solver");
}

}  // namespace

extern "C" {

const char* sppc_version(void) { return "0.1.0"; }

const char* sppc_last_error(void) { return last_error.c_str(); }

void sppc_string_free(char* s) { std::free(s); }

sppc_status sppc_plant_create(size_t n, const double* a, const double* b, sppc_plant** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    slot = new sppc_plant{sppc::PlantModel(read_matrix(a, n, n, "a"), read_matrix(b, n, 1, "b"))};
  });
}

sppc_status sppc_plant_create_from_poles(size_t n, const double* re, const double* im,
                                         sppc_plant** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    if (re == nullptr || im == nullptr) throw ArgumentError("poles");
    std::vector<std::complex<double>> poles;
    for (std::size_t i = 0; i < n; ++i) poles.emplace_back(re[i], im[i]);
    slot = new sppc_plant{sppc::PlantModel::from_poles(poles)};
  });
}

void sppc_plant_destroy(sppc_plant* plant) { delete plant; }

sppc_status sppc_plant_dimension(const sppc_plant* plant, size_t* n) {
  return try_([&] { deref(n, "n") = static_cast<size_t>(deref(plant, "plant").model.n()); });
}

sppc_status sppc_plant_matrices(const sppc_plant* plant, double* a, double* b) {
  return try_([&] {
    const auto& m = deref(plant, "plant").model;
    write_matrix(m.A(), a);
    write_matrix(m.B(), b);
  });
}

sppc_status sppc_plant_step(const sppc_plant* plant, const double* x, double u, double* x_next) {
  return try_([&] {
    const auto& m = deref(plant, "plant").model;
    const auto n = static_cast<std::size_t>(m.n());
    const sppc::Vector next = m.step(read_matrix(x, n, 1, "x"), u);
    write_matrix(next, &deref(x_next, "x_next"));
  });
}

sppc_status sppc_is_reachable(size_t n, const double* a, const double* b, int* reachable) {
  return try_([&] {
    deref(reachable, "reachable") =
        sppc::is_reachable(read_matrix(a, n, n, "a"), read_matrix(b, n, 1, "b")) ? 1 : 0;
  });
}

sppc_status sppc_controller_create(const sppc_plant* plant, const double* q, int horizon,
                                   double alpha, sppc_c_interpretation interp,
                                   sppc_controller** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    const auto& model = deref(plant, "plant").model;
    const auto n = static_cast<std::size_t>(model.n());
    const sppc::Matrix qm =
        q ? read_matrix(q, n, n, "q") : sppc::Matrix(sppc::Matrix::Identity(model.n(), model.n()));
    sppc::CInterpretation ci;
    switch (interp) {
      case SPPC_C_COLUMN_LIFT: ci = sppc::CInterpretation::ColumnLift; break;
      case SPPC_C_BLOCK_ROW: ci = sppc::CInterpretation::BlockRow; break;
      default: throw ArgumentError("interp");
    }
    auto syn = sppc::synthesize(model, qm, horizon, alpha, ci);
    auto h = sppc::build_horizon(model, qm, syn.P, horizon);
    slot = new sppc_controller{model, std::move(syn), std::move(h)};
  });
}

void sppc_controller_destroy(sppc_controller* ctrl) { delete ctrl; }

sppc_status sppc_controller_horizon(const sppc_controller* ctrl, int* horizon) {
  return try_([&] { deref(horizon, "horizon") = deref(ctrl, "ctrl").horizon.N; });
}

sppc_status sppc_controller_scalars(const sppc_controller* ctrl, double* rho, double* c,
                                    double* riccati_residual, int* riccati_iterations) {
  return try_([&] {
    const auto& s = deref(ctrl, "ctrl").synthesis;
    if (rho) *rho = s.rho;
    if (c) *c = s.c;
    if (riccati_residual) *riccati_residual = s.riccati_residual;
    if (riccati_iterations) *riccati_iterations = s.riccati_iterations;
  });
}

sppc_status sppc_controller_matrices(const sppc_controller* ctrl, double* p, double* eps,
                                     double* w) {
  return try_([&] {
    const auto& s = deref(ctrl, "ctrl").synthesis;
    write_matrix(s.P, p);
    write_matrix(s.Eps, eps);
    write_matrix(s.W, w);
  });
}

sppc_status sppc_controller_design(const sppc_controller* ctrl, sppc_solver solver,
                                   const double* x, double lambda, double* coeffs, int* l0,
                                   double* residual_sq, double* threshold) {
  return try_([&] {
    const auto& c = deref(ctrl, "ctrl");
    double* dst = &deref(coeffs, "coeffs");
    const sppc::Vector xv = read_matrix(x, static_cast<std::size_t>(c.plant.n()), 1, "x");
    const sppc::ControlPacket pkt = solver_kind(solver) == sppc::SolverKind::Omp
                                        ? sppc::omp_design(c.horizon, c.synthesis.W, xv)
                                        : sppc::l1_design(c.horizon, xv, lambda, lambda);
    write_matrix(pkt.coeffs, dst);
    if (l0) *l0 = pkt.l0();
    if (residual_sq) *residual_sq = pkt.residual_sq;
    if (threshold) *threshold = pkt.threshold;
  });
}

sppc_status sppc_experiment_create(const char* config_json, sppc_experiment** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    slot = new sppc_experiment{sppc::parse_config(&deref(config_json, "config_json")), {}};
  });
}

sppc_status sppc_experiment_load(const char* path, sppc_experiment** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    slot = new sppc_experiment{sppc::load_config(&deref(path, "path")), {}};
  });
}

void sppc_experiment_destroy(sppc_experiment* exp) { delete exp; }

sppc_status sppc_experiment_set_seed(sppc_experiment* exp, uint64_t seed) {
  return try_([&] {
    auto& e = deref(exp, "exp");
    e.config.seed = seed;
    if (e.built) e.built->config.seed = seed;
  });
}

sppc_status sppc_experiment_set_trials(sppc_experiment* exp, int trials) {
  return try_([&] {
    auto& e = deref(exp, "exp");
    if (trials < 1) sppc::fail(sppc::ErrorCode::Config, "'trials' must be >= 1");
    e.config.trials = trials;
    if (e.built) e.built->config.trials = trials;
  });
}

sppc_status sppc_experiment_set_solver(sppc_experiment* exp, const char* solver) {
  return try_([&] {
    auto& e = deref(exp, "exp");
    const auto choice = sppc::solver_choice_from_string(&deref(solver, "solver"));
    e.config.solver = choice;
    if (e.built) e.built->config.solver = choice;
  });
}

sppc_status sppc_experiment_uses_solver(sppc_experiment* exp, sppc_solver solver, int* used) {
  return try_([&] {
    const auto kinds = sppc::solvers_of(deref(exp, "exp").config.solver);
    const auto want = solver_kind(solver);
    deref(used, "used") = std::find(kinds.begin(), kinds.end(), want) != kinds.end() ? 1 : 0;
  });
}

sppc_status sppc_experiment_config_json(sppc_experiment* exp, char** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = copy_string(sppc::serialize_config(sppc::resolved(deref(exp, "exp").config)));
  });
}

sppc_status sppc_experiment_synthesize(sppc_experiment* exp, char** manifest_json,
                                       int* checks_ok) {
  return try_([&] {
    auto& slot = deref(manifest_json, "manifest_json");
    slot = nullptr;
    const auto manifest = sppc::synthesis_manifest(deref(exp, "exp").get());
    if (checks_ok) *checks_ok = manifest.ok ? 1 : 0;
    slot = copy_string(manifest.json);
  });
}

sppc_status sppc_experiment_simulate(sppc_experiment* exp, sppc_solver solver, sppc_trace** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    const auto kind = solver_kind(solver);
    const auto& e = deref(exp, "exp").get();
    auto trace = sppc::run_trial(e.plant, e.horizon, e.synthesis,
                                 sppc::loop_settings(e.config, kind), e.x0, e.config.seed);
    slot = new sppc_trace{std::move(trace)};
  });
}

void sppc_trace_destroy(sppc_trace* trace) { delete trace; }

sppc_status sppc_trace_length(const sppc_trace* trace, size_t* len) {
  return try_([&] { deref(len, "len") = deref(trace, "trace").trace.steps.size(); });
}

sppc_status sppc_trace_record(const sppc_trace* trace, size_t k, sppc_step_record* rec) {
  return try_([&] {
    const auto& steps = deref(trace, "trace").trace.steps;
    if (k >= steps.size()) throw ArgumentError("k");
    const auto& r = steps[k];
    deref(rec, "rec") = {r.k, r.norm_x, r.input, r.dropped ? 1 : 0, r.l0, r.design_time_us};
  });
}

sppc_status sppc_trace_csv(const sppc_trace* trace, char** csv) {
  return try_([&] { deref(csv, "csv") = copy_string(sppc::trace_csv(deref(trace, "trace").trace)); });
}

sppc_status sppc_experiment_montecarlo(sppc_experiment* exp, int threads, sppc_montecarlo** out) {
  return try_([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    if (threads < 1) throw ArgumentError("threads");
    slot = new sppc_montecarlo{sppc::montecarlo_outputs(deref(exp, "exp").get(), threads)};
  });
}

void sppc_montecarlo_destroy(sppc_montecarlo* mc) { delete mc; }

sppc_status sppc_montecarlo_aggregate_csv(const sppc_montecarlo* mc, char** csv) {
  return try_([&] { deref(csv, "csv") = copy_string(deref(mc, "mc").outputs.aggregate_csv); });
}

sppc_status sppc_montecarlo_summary_json(const sppc_montecarlo* mc, char** json) {
  return try_([&] { deref(json, "json") = copy_string(deref(mc, "mc").outputs.summary_json); });
}

sppc_status sppc_montecarlo_mean_norm(const sppc_montecarlo* mc, sppc_solver solver, double* out,
                                      size_t len) {
  return try_([&] {
    const auto kind = solver_kind(solver);
    double* dst = &deref(out, "out");
    for (const auto& [s, r] : deref(mc, "mc").outputs.results) {
      if (s != kind) continue;
      if (len != r.mean_norm_x.size()) throw ArgumentError("len");
      std::copy(r.mean_norm_x.begin(), r.mean_norm_x.end(), dst);
      return;
    }
    throw ArgumentError("solver not part of this batch");
  });
}

}  // extern "C"
