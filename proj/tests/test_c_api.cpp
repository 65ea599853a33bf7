#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "sppc/sppc.h"

namespace {

const char* kScalar = R"({
  "plant": {"A": [[2.0]], "B": [1.0]},
  "N": 2, "Q": [[1.0]], "x0": [1.0], "p_drop": 0.0, "steps": 5, "trials": 1, "seed": 7
})";

const char* kExample = R"({
  "plant": {"poles": [-1.4396, [1.0808, 0.6664], [1.0808, -0.6664], 0.022]},
  "N": 10, "steps": 40, "trials": 12
})";

std::string take(char* s) {
  std::string out = s ? s : "";
  sppc_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and error plumbing") {
  CHECK(std::string(sppc_version()) == "0.1.0");
  sppc_plant* p = nullptr;
  CHECK(sppc_plant_create(1, nullptr, nullptr, &p) == SPPC_ERROR_ARGUMENT);
  CHECK(p == nullptr);
  CHECK(std::strlen(sppc_last_error()) > 0);
  CHECK(sppc_plant_dimension(nullptr, nullptr) == SPPC_ERROR_ARGUMENT);
  sppc_string_free(nullptr);
  sppc_plant_destroy(nullptr);
  sppc_controller_destroy(nullptr);
  sppc_experiment_destroy(nullptr);
  sppc_trace_destroy(nullptr);
  sppc_montecarlo_destroy(nullptr);
}

TEST_CASE("plant create, query and step") {
  const double a[4] = {0.0, 1.0, -0.5, 1.2};
  const double b[2] = {0.0, 1.0};
  sppc_plant* p = nullptr;
  REQUIRE(sppc_plant_create(2, a, b, &p) == SPPC_OK);
  size_t n = 0;
  CHECK(sppc_plant_dimension(p, &n) == SPPC_OK);
  CHECK(n == 2);
  double a_out[4], b_out[2];
  CHECK(sppc_plant_matrices(p, a_out, b_out) == SPPC_OK);
  for (int i = 0; i < 4; ++i) CHECK(a_out[i] == a[i]);
  CHECK(b_out[1] == 1.0);
  const double x[2] = {1.0, 2.0};
  double xn[2];
  CHECK(sppc_plant_step(p, x, 3.0, xn) == SPPC_OK);
  CHECK(xn[0] == 2.0);
  CHECK(xn[1] == doctest::Approx(-0.5 + 2.4 + 3.0));
  sppc_plant_destroy(p);
}

TEST_CASE("unreachable plants and bad poles are config errors") {
  const double a[4] = {1.0, 0.0, 0.0, 2.0};
  const double b[2] = {1.0, 0.0};
  int reachable = -1;
  CHECK(sppc_is_reachable(2, a, b, &reachable) == SPPC_OK);
  CHECK(reachable == 0);
  sppc_plant* p = nullptr;
  CHECK(sppc_plant_create(2, a, b, &p) == SPPC_ERROR_CONFIG);
  CHECK(std::string(sppc_last_error()).find("plant not reachable") != std::string::npos);

  const double re[2] = {0.5, 0.5};
  const double im[2] = {0.3, 0.1};
  CHECK(sppc_plant_create_from_poles(2, re, im, &p) == SPPC_ERROR_CONFIG);
  const double nan_a[1] = {std::nan("")};
  const double one[1] = {1.0};
  CHECK(sppc_plant_create(1, nan_a, one, &p) == SPPC_ERROR_NUMERIC);
  CHECK(p == nullptr);
}

TEST_CASE("scalar controller values and packet design") {
  const double a[1] = {2.0}, b[1] = {1.0};
  sppc_plant* p = nullptr;
  REQUIRE(sppc_plant_create(1, a, b, &p) == SPPC_OK);
  sppc_controller* ctrl = nullptr;
  REQUIRE(sppc_controller_create(p, nullptr, 2, 0.5, SPPC_C_COLUMN_LIFT, &ctrl) == SPPC_OK);
  int N = 0;
  CHECK(sppc_controller_horizon(ctrl, &N) == SPPC_OK);
  CHECK(N == 2);
  double rho = -1, c = -1, res = -1;
  int iters = -1;
  CHECK(sppc_controller_scalars(ctrl, &rho, &c, &res, &iters) == SPPC_OK);
  CHECK(rho == 0.0);
  CHECK(c == doctest::Approx(5.0 * (3.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-12));
  double P = 0, eps = 0, w = 0;
  CHECK(sppc_controller_matrices(ctrl, &P, &eps, &w) == SPPC_OK);
  CHECK(P == doctest::Approx(1.0));
  CHECK(w == doctest::Approx((3.0 - 2.0 * std::sqrt(2.0)) / 10.0).epsilon(1e-12));
  CHECK(sppc_controller_matrices(ctrl, nullptr, nullptr, nullptr) == SPPC_OK);

  const double x[1] = {1.0};
  double u[2] = {9, 9};
  int l0 = -1;
  double r = -1, thr = -1;
  CHECK(sppc_controller_design(ctrl, SPPC_SOLVER_OMP, x, 0.0, u, &l0, &r, &thr) == SPPC_OK);
  CHECK(u[0] == doctest::Approx(-2.0));
  CHECK(u[1] == 0.0);
  CHECK(l0 == 1);
  CHECK(r <= thr);
  CHECK(sppc_controller_design(ctrl, SPPC_SOLVER_L1, x, 1e-3, u, nullptr, nullptr, nullptr) == SPPC_OK);
  CHECK(sppc_controller_design(ctrl, SPPC_SOLVER_L1, x, 0.0, u, nullptr, nullptr, nullptr) != SPPC_OK);
  CHECK(sppc_controller_design(ctrl, static_cast<sppc_solver>(7), x, 1.0, u, nullptr, nullptr, nullptr) ==
        SPPC_ERROR_ARGUMENT);
  CHECK(sppc_controller_design(ctrl, SPPC_SOLVER_OMP, nullptr, 1.0, u, nullptr, nullptr, nullptr) ==
        SPPC_ERROR_ARGUMENT);

  sppc_controller* bad = nullptr;
  CHECK(sppc_controller_create(p, nullptr, 0, 0.5, SPPC_C_COLUMN_LIFT, &bad) != SPPC_OK);
  CHECK(sppc_controller_create(p, nullptr, 2, 1.5, SPPC_C_COLUMN_LIFT, &bad) != SPPC_OK);
  CHECK(bad == nullptr);
  sppc_controller_destroy(ctrl);
  sppc_plant_destroy(p);
}

TEST_CASE("experiment synthesize and simulate") {
  sppc_experiment* exp = nullptr;
  REQUIRE(sppc_experiment_create(kScalar, &exp) == SPPC_OK);
  char* manifest = nullptr;
  int ok = 0;
  CHECK(sppc_experiment_synthesize(exp, &manifest, &ok) == SPPC_OK);
  CHECK(ok == 1);
  CHECK(take(manifest).find("\"ok\": true") != std::string::npos);

  sppc_trace* tr = nullptr;
  REQUIRE(sppc_experiment_simulate(exp, SPPC_SOLVER_OMP, &tr) == SPPC_OK);
  size_t len = 0;
  CHECK(sppc_trace_length(tr, &len) == SPPC_OK);
  CHECK(len == 6);
  sppc_step_record rec{};
  CHECK(sppc_trace_record(tr, 0, &rec) == SPPC_OK);
  CHECK(rec.k == 0);
  CHECK(rec.norm_x == 1.0);
  CHECK(rec.input == doctest::Approx(-2.0));
  CHECK(rec.l0 == 1);
  CHECK(rec.dropped == 0);
  CHECK(sppc_trace_record(tr, 6, &rec) == SPPC_ERROR_ARGUMENT);
  char* csv = nullptr;
  CHECK(sppc_trace_csv(tr, &csv) == SPPC_OK);
  CHECK(take(csv).rfind("k,norm_x,l0_u,dropped,input,design_time_us\n", 0) == 0);
  sppc_trace_destroy(tr);

  int used = -1;
  CHECK(sppc_experiment_uses_solver(exp, SPPC_SOLVER_L1, &used) == SPPC_OK);
  CHECK(used == 0);
  CHECK(sppc_experiment_set_solver(exp, "both") == SPPC_OK);
  CHECK(sppc_experiment_uses_solver(exp, SPPC_SOLVER_L1, &used) == SPPC_OK);
  CHECK(used == 1);
  CHECK(sppc_experiment_set_solver(exp, "greedy") == SPPC_ERROR_CONFIG);
  CHECK(sppc_experiment_set_trials(exp, 0) == SPPC_ERROR_CONFIG);
  CHECK(sppc_experiment_set_seed(exp, 99) == SPPC_OK);
  char* cfg = nullptr;
  CHECK(sppc_experiment_config_json(exp, &cfg) == SPPC_OK);
  const std::string cfg_text = take(cfg);
  CHECK(cfg_text.find("\"seed\": 99") != std::string::npos);
  CHECK(cfg_text.find("\"solver\": \"both\"") != std::string::npos);
  sppc_experiment_destroy(exp);
}

TEST_CASE("experiment errors map to status codes") {
  sppc_experiment* exp = nullptr;
  CHECK(sppc_experiment_create("{oops", &exp) == SPPC_ERROR_CONFIG);
  // The plant is built on first use, so reachability surfaces at synthesis.
  REQUIRE(sppc_experiment_create(R"({"plant": {"A": [[1, 0], [0, 2]], "B": [1, 0]}})", &exp) ==
          SPPC_OK);
  char* manifest = nullptr;
  int ok = -1;
  CHECK(sppc_experiment_synthesize(exp, &manifest, &ok) == SPPC_ERROR_CONFIG);
  CHECK(manifest == nullptr);
  CHECK(std::string(sppc_last_error()).find("plant not reachable") != std::string::npos);
  sppc_experiment_destroy(exp);
  exp = nullptr;
  CHECK(sppc_experiment_load("/nonexistent/config.json", &exp) == SPPC_ERROR_CONFIG);
  CHECK(sppc_experiment_create(nullptr, &exp) == SPPC_ERROR_ARGUMENT);
  CHECK(exp == nullptr);
}

TEST_CASE("montecarlo via the C API is thread-count independent") {
  sppc_experiment* exp = nullptr;
  REQUIRE(sppc_experiment_create(kExample, &exp) == SPPC_OK);
  sppc_montecarlo* seq = nullptr;
  sppc_montecarlo* par = nullptr;
  REQUIRE(sppc_experiment_montecarlo(exp, 1, &seq) == SPPC_OK);
  REQUIRE(sppc_experiment_montecarlo(exp, 3, &par) == SPPC_OK);
  char *a = nullptr, *b = nullptr;
  CHECK(sppc_montecarlo_aggregate_csv(seq, &a) == SPPC_OK);
  CHECK(sppc_montecarlo_aggregate_csv(par, &b) == SPPC_OK);
  CHECK(take(a) == take(b));

  std::vector<double> mean(41);
  CHECK(sppc_montecarlo_mean_norm(seq, SPPC_SOLVER_OMP, mean.data(), mean.size()) == SPPC_OK);
  CHECK(mean[0] == doctest::Approx(1.0));
  CHECK(mean[40] < mean[0]);
  CHECK(sppc_montecarlo_mean_norm(seq, SPPC_SOLVER_OMP, mean.data(), 10) == SPPC_ERROR_ARGUMENT);
  CHECK(sppc_montecarlo_mean_norm(seq, SPPC_SOLVER_L1, mean.data(), mean.size()) == SPPC_ERROR_ARGUMENT);
  char* js = nullptr;
  CHECK(sppc_montecarlo_summary_json(seq, &js) == SPPC_OK);
  CHECK(take(js).find("\"trials\": 12") != std::string::npos);
  CHECK(sppc_experiment_montecarlo(exp, 0, &seq) == SPPC_ERROR_ARGUMENT);

  sppc_montecarlo_destroy(seq);
  sppc_montecarlo_destroy(par);
  sppc_experiment_destroy(exp);
}
