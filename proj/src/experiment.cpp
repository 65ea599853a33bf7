#include "sppc/experiment.hpp"

#include <fmt/core.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "sppc/errors.hpp"
#include "sppc/solvers.hpp"

namespace sppc {

using json = nlohmann::ordered_json;

std::string_view to_string(SolverChoice s) noexcept {
  switch (s) {
    case SolverChoice::Omp: return "omp";
    case SolverChoice::L1: return "l1";
    case SolverChoice::Both: return "both";
  }
  return "omp";
}

SolverChoice solver_choice_from_string(std::string_view s) {
  if (s == "omp") return SolverChoice::Omp;
  if (s == "l1") return SolverChoice::L1;
  if (s == "both") return SolverChoice::Both;
  fail(ErrorCode::Config, "unknown solver '" + std::string(s) + "' (expected omp, l1 or both)");
}

namespace {

template <class M>
bool same_matrix(const std::optional<M>& a, const std::optional<M>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->rows() == b->rows() && a->cols() == b->cols() && *a == *b;
}

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Config, what); }

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) config_error("'" + key + "' must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) config_error("'" + key + "' must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    config_error("'" + key + "' out of range");
  return static_cast<int>(v);
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) config_error("'" + key + "' must be a string");
  return j.get<std::string>();
}

Vector get_vector(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) config_error("'" + key + "' must be a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_real(j[i], key);
  return v;
}

Matrix get_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    config_error("'" + key + "' must be a non-empty array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) config_error("'" + key + "' has ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_real(j[r][c], key);
  }
  return m;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void check_ranges(const ExperimentConfig& c) {
  if (c.N < 1) config_error("'N' must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) config_error("'alpha' must lie in (0, 1)");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) config_error("'lambda' must be positive");
  if (!(c.p_drop >= 0.0 && c.p_drop <= 1.0)) config_error("'p_drop' must lie in [0, 1]");
  if (c.steps < 0) config_error("'steps' must be >= 0");
  if (c.trials < 1) config_error("'trials' must be >= 1");
}

json config_json(const ExperimentConfig& c) {
  json j = json::object();
  json plant = json::object();
  if (c.poles) {
    json poles = json::array();
    for (const auto& p : *c.poles) {
      if (p.imag() == 0.0)
        poles.push_back(p.real());
      else
        poles.push_back(json::array({p.real(), p.imag()}));
    }
    plant["poles"] = std::move(poles);
  } else {
    plant["A"] = to_json(*c.A);
    plant["B"] = to_json(*c.B);
  }
  j["plant"] = std::move(plant);
  j["N"] = c.N;
  j["Q"] = c.Q ? to_json(*c.Q) : json("identity");
  j["alpha"] = c.alpha;
  j["c_interpretation"] = std::string(to_string(c.c_interpretation));
  j["solver"] = std::string(to_string(c.solver));
  j["lambda"] = c.lambda;
  j["omp_selection"] = std::string(to_string(c.omp_selection));
  if (c.x0) j["x0"] = to_json(*c.x0);
  j["p_drop"] = c.p_drop;
  j["steps"] = c.steps;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return same_matrix(a.A, b.A) && same_matrix(a.B, b.B) && a.poles == b.poles && a.N == b.N &&
         same_matrix(a.Q, b.Q) && a.alpha == b.alpha && a.c_interpretation == b.c_interpretation &&
         a.solver == b.solver && a.lambda == b.lambda && a.omp_selection == b.omp_selection &&
         same_matrix(a.x0, b.x0) && a.p_drop == b.p_drop && a.steps == b.steps &&
         a.trials == b.trials && a.seed == b.seed;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");

  static const std::set<std::string> known{
      "plant",  "N",  "Q",      "alpha", "c_interpretation", "solver", "lambda",
      "omp_selection", "x0", "p_drop", "steps", "trials", "seed"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) config_error("unknown config key '" + key + "'");

  ExperimentConfig c;
  if (!j.contains("plant") || !j["plant"].is_object()) config_error("'plant' object is required");
  const json& plant = j["plant"];
  for (const auto& [key, _] : plant.items())
    if (key != "A" && key != "B" && key != "poles") config_error("unknown plant key '" + key + "'");
  const bool explicit_ab = plant.contains("A") || plant.contains("B");
  if (explicit_ab == plant.contains("poles"))
    config_error("plant needs exactly one of {A, B} or poles");
  if (explicit_ab) {
    if (!plant.contains("A") || !plant.contains("B")) config_error("plant needs both A and B");
    c.A = get_matrix(plant["A"], "A");
    c.B = get_vector(plant["B"], "B");
    if (c.A->rows() != c.A->cols()) config_error("'A' must be square");
    if (c.B->size() != c.A->rows()) config_error("'B' length must equal the order of A");
  } else {
    const json& pj = plant["poles"];
    if (!pj.is_array() || pj.empty()) config_error("'poles' must be a non-empty array");
    std::vector<std::complex<double>> poles;
    for (const auto& p : pj) {
      if (p.is_number()) {
        poles.emplace_back(p.get<double>(), 0.0);
      } else if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
        poles.emplace_back(p[0].get<double>(), p[1].get<double>());
      } else {
        config_error("each pole must be a number or a [re, im] pair");
      }
    }
    c.poles = std::move(poles);
  }

  if (j.contains("N")) c.N = get_int(j["N"], "N");
  if (j.contains("Q")) {
    if (j["Q"].is_string()) {
      if (j["Q"].get<std::string>() != "identity") config_error("'Q' string must be \"identity\"");
    } else {
      c.Q = get_matrix(j["Q"], "Q");
    }
  }
  if (j.contains("alpha")) c.alpha = get_real(j["alpha"], "alpha");
  if (j.contains("c_interpretation"))
    c.c_interpretation = c_interpretation_from_string(get_string(j["c_interpretation"], "c_interpretation"));
  if (j.contains("solver")) c.solver = solver_choice_from_string(get_string(j["solver"], "solver"));
  if (j.contains("lambda")) c.lambda = get_real(j["lambda"], "lambda");
  if (j.contains("omp_selection"))
    c.omp_selection = omp_selection_from_string(get_string(j["omp_selection"], "omp_selection"));
  if (j.contains("x0")) c.x0 = get_vector(j["x0"], "x0");
  if (j.contains("p_drop")) c.p_drop = get_real(j["p_drop"], "p_drop");
  if (j.contains("steps")) c.steps = get_int(j["steps"], "steps");
  if (j.contains("trials")) c.trials = get_int(j["trials"], "trials");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      config_error("'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  check_ranges(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig resolved(const ExperimentConfig& cfg) {
  ExperimentConfig out = cfg;
  if (!out.x0) {
    const Eigen::Index n = cfg.poles ? static_cast<Eigen::Index>(cfg.poles->size()) : cfg.A->rows();
    out.x0 = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

Experiment build_experiment(const ExperimentConfig& cfg_in) {
  check_ranges(cfg_in);
  const ExperimentConfig cfg = resolved(cfg_in);
  PlantModel plant = cfg.poles ? PlantModel::from_poles(*cfg.poles)
                               : PlantModel(*cfg.A, Matrix(*cfg.B));
  const Eigen::Index n = plant.n();
  Matrix q = cfg.Q ? *cfg.Q : Matrix::Identity(n, n);
  if (q.rows() != n || q.cols() != n) config_error("'Q' must be " + std::to_string(n) + "x" + std::to_string(n));
  if (cfg.x0->size() != n) config_error("'x0' must have length " + std::to_string(n));
  if (!cfg.x0->allFinite()) config_error("'x0' must be finite");

  SynthesisResult syn = synthesize(plant, q, cfg.N, cfg.alpha, cfg.c_interpretation);
  HorizonData h = build_horizon(plant, q, syn.P, cfg.N);
  Vector x0 = *cfg.x0;
  return Experiment{cfg, std::move(plant), std::move(q), std::move(x0), std::move(syn), std::move(h)};
}

std::vector<SolverKind> solvers_of(SolverChoice choice) {
  switch (choice) {
    case SolverChoice::Omp: return {SolverKind::Omp};
    case SolverChoice::L1: return {SolverKind::L1};
    case SolverChoice::Both: return {SolverKind::Omp, SolverKind::L1};
  }
  return {SolverKind::Omp};
}

LoopSettings loop_settings(const ExperimentConfig& cfg, SolverKind solver) {
  LoopSettings s;
  s.solver = solver;
  s.omp_selection = cfg.omp_selection;
  s.lambda = cfg.lambda;
  s.p_drop = cfg.p_drop;
  s.steps = cfg.steps;
  return s;
}

Manifest synthesis_manifest(const Experiment& exp) {
  const auto& syn = exp.synthesis;
  auto checks = verify(syn, exp.plant);

  checks.push_back({"plant_reachable", is_reachable(exp.plant), 1.0, 1.0});

  // Full-support least squares must reach x0^T (P - Q) x0 exactly.
  const Vector y = exp.horizon.H * exp.x0;
  const Vector u = numerics::solve_least_squares(exp.horizon.G, y);
  const double best = (exp.horizon.G * u - y).squaredNorm();
  const double target = exp.x0.dot((syn.P - syn.Q) * exp.x0);
  const double rel = std::abs(best - target) / std::max(1e-300, std::abs(target) + exp.x0.squaredNorm());
  checks.push_back({"feasibility_identity_at_x0", rel <= 1e-8, rel, 1e-8});

  bool ok = true;
  json jc = json::array();
  for (const auto& c : checks) {
    ok = ok && c.pass;
    jc.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
  }
  json j;
  j["config"] = config_json(exp.config);
  j["plant"] = {{"A", to_json(exp.plant.A())}, {"B", to_json(Vector(exp.plant.B().col(0)))}};
  j["synthesis"] = {{"Q", to_json(syn.Q)},
                    {"P", to_json(syn.P)},
                    {"rho", syn.rho},
                    {"c", syn.c},
                    {"Eps", to_json(syn.Eps)},
                    {"W", to_json(syn.W)},
                    {"alpha", syn.alpha},
                    {"c_interpretation", std::string(to_string(syn.c_interpretation))},
                    {"riccati_iterations", syn.riccati_iterations},
                    {"riccati_residual", syn.riccati_residual}};
  j["checks"] = std::move(jc);
  j["ok"] = ok;
  return {j.dump(2), ok};
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string trace_csv(const SimTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace.steps) {
    out += fmt::format("{},{},{},{},{},{}\n", r.k, format_real(r.norm_x), r.l0, r.dropped ? 1 : 0,
                       format_real(r.input), format_real(r.design_time_us));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> simulate_outputs(const Experiment& exp) {
  std::vector<std::pair<std::string, std::string>> files;
  const auto solvers = solvers_of(exp.config.solver);
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const auto trace = run_trial(exp.plant, exp.horizon, exp.synthesis,
                                 loop_settings(exp.config, solvers[i]), exp.x0, exp.config.seed);
    files.emplace_back(i == 0 ? "trace.csv" : "trace_l1.csv", trace_csv(trace));
  }
  return files;
}

DecayFit log_decay_fit(const std::vector<double>& curve) {
  DecayFit fit;
  if (curve.empty()) return fit;
  const int last = static_cast<int>(curve.size()) - 1;
  for (double v : curve) fit.reached_zero = fit.reached_zero || v == 0.0;

  auto collect = [&](int from) {
    std::vector<std::pair<double, double>> pts;
    for (int k = from; k <= last; ++k)
      if (curve[static_cast<std::size_t>(k)] > 0.0)
        pts.emplace_back(k, std::log(curve[static_cast<std::size_t>(k)]));
    return pts;
  };
  auto pts = collect((last + 1) / 2);
  if (pts.size() < 2) pts = collect(0);
  if (pts.size() < 2) return fit;

  double mk = 0.0, ml = 0.0;
  for (const auto& [k, l] : pts) {
    mk += k;
    ml += l;
  }
  mk /= static_cast<double>(pts.size());
  ml /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [k, l] : pts) {
    sxy += (k - mk) * (l - ml);
    sxx += (k - mk) * (k - mk);
  }
  fit.slope = sxy / sxx;
  fit.first_k = static_cast<int>(pts.front().first);
  fit.last_k = static_cast<int>(pts.back().first);
  return fit;
}

MonteCarloOutputs montecarlo_outputs(const Experiment& exp, int threads) {
  MonteCarloOutputs out;
  for (SolverKind s : solvers_of(exp.config.solver)) {
    out.results.emplace_back(
        s, run_montecarlo(exp.plant, exp.horizon, exp.synthesis, loop_settings(exp.config, s),
                          exp.x0, exp.config.trials, exp.config.seed, threads));
  }

  std::string csv = "k";
  for (const auto& [s, _] : out.results)
    csv += s == SolverKind::Omp ? ",mean_norm_x_omp,mean_l0_omp" : ",mean_norm_x_l1,mean_l1_l0";
  csv += '\n';
  const std::size_t len = static_cast<std::size_t>(exp.config.steps) + 1;
  for (std::size_t k = 0; k < len; ++k) {
    csv += std::to_string(k);
    for (const auto& [s, r] : out.results)
      csv += "," + format_real(r.mean_norm_x[k]) + "," + format_real(r.mean_l0[k]);
    csv += '\n';
  }
  out.aggregate_csv = std::move(csv);

  json summary;
  summary["trials"] = exp.config.trials;
  summary["steps"] = exp.config.steps;
  summary["base_seed"] = exp.config.seed;
  json per_solver = json::object();
  for (const auto& [s, r] : out.results) {
    const DecayFit fit = log_decay_fit(r.mean_norm_x);
    double sparsity = 0.0;
    for (const auto& t : r.trials) sparsity += t.mean_l0;
    sparsity /= static_cast<double>(r.trials.size());
    json trials = json::array();
    for (const auto& t : r.trials)
      trials.push_back({{"seed", t.seed},
                        {"initial_norm_x", t.initial_norm},
                        {"final_norm_x", t.final_norm},
                        {"mean_l0", t.mean_l0},
                        {"drops", t.drops},
                        {"longest_drop_run", t.longest_drop_run},
                        {"mean_design_time_us", t.mean_design_time_us}});
    per_solver[std::string(to_string(s))] = {
        {"decay_slope", fit.slope ? json(*fit.slope) : json(nullptr)},
        {"decay_window", {fit.first_k, fit.last_k}},
        {"reached_zero", fit.reached_zero},
        {"initial_mean_norm_x", r.mean_norm_x.front()},
        {"final_mean_norm_x", r.mean_norm_x.back()},
        {"mean_sparsity", sparsity},
        {"mean_design_time_us", r.mean_design_time_us},
        {"per_trial", std::move(trials)}};
  }
  summary["solvers"] = std::move(per_solver);
  out.summary_json = summary.dump(2);
  return out;
}

}  // namespace sppc
