#include "sppc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sppc/errors.hpp"

namespace sppc {

std::string_view to_string(CInterpretation c) noexcept {
  return c == CInterpretation::ColumnLift ? "column_lift" : "block_row";
}

CInterpretation c_interpretation_from_string(std::string_view s) {
  if (s == "column_lift") return CInterpretation::ColumnLift;
  if (s == "block_row") return CInterpretation::BlockRow;
  fail(ErrorCode::Config, "unknown c_interpretation '" + std::string(s) + "'");
}

namespace {

void check_q(const PlantModel& plant, const Matrix& q) {
  if (q.rows() != plant.n() || q.cols() != plant.n())
    fail(ErrorCode::DimensionMismatch, "Q must be n x n");
  numerics::cholesky(q);  // symmetric positive definite
}

Matrix riccati_map(const Matrix& a, const Vector& b, const Matrix& q, const Matrix& p) {
  const Vector pb = p * b;
  const double bpb = b.dot(pb);
  if (!(bpb > 1e-12))
    fail(ErrorCode::DegenerateInput, "B^T P B is not positive (" + std::to_string(bpb) + ")");
  const Vector apb = a.transpose() * pb;  // A^T P B
  Matrix next = a.transpose() * p * a - (apb * apb.transpose()) / bpb + q;
  return 0.5 * (next + next.transpose());
}

}  // namespace

double riccati_residual(const PlantModel& plant, const Matrix& q, const Matrix& p) {
  return numerics::max_abs(riccati_map(plant.A(), plant.B().col(0), q, p) - p);
}

RiccatiSolution solve_riccati(const PlantModel& plant, const Matrix& q) {
  check_q(plant, q);
  const Matrix& a = plant.A();
  const Vector b = plant.B().col(0);
  Matrix p = 0.5 * (q + q.transpose());
  for (int it = 1; it <= kRiccatiMaxIterations; ++it) {
    Matrix next = riccati_map(a, b, q, p);
    if (!next.allFinite())
      fail(ErrorCode::NoConvergence, "Riccati iteration diverged");
    const double change = numerics::max_abs(next - p);
    p = std::move(next);
    if (change <= kRiccatiRelTol * numerics::max_abs(p)) {
      return {p, it, riccati_residual(plant, q, p)};
    }
  }
  fail(ErrorCode::NoConvergence, "Riccati iteration did not converge in " +
                                     std::to_string(kRiccatiMaxIterations) + " steps");
}

double compute_rho(const Matrix& q, const Matrix& p) {
  return std::max(0.0, 1.0 - numerics::general_eigen_min(q, p));
}

double geometric_prefactor(double rho, int horizon) {
  if (!(rho >= 0.0 && rho < 1.0)) fail(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");
  return (1.0 - std::pow(rho, horizon)) / (1.0 - rho);
}

double compute_c(const HorizonData& h, const Matrix& p, double rho, CInterpretation interp) {
  const double prefactor = geometric_prefactor(rho, h.N);
  const Matrix k = h.G.transpose() * h.G;  // Phi^T Qbar Phi
  const Eigen::Index n = h.n;
  double worst = 0.0;
  if (interp == CInterpretation::ColumnLift) {
    const Matrix identity = Matrix::Identity(h.N, h.N);
    const double lmax_kinv = numerics::general_eigen_max(identity, k);
    for (int i = 0; i < h.N; ++i) {
      double s = 0.0;
      for (int blk = 0; blk < h.N; ++blk) {
        const Vector part = h.Phi.block(blk * n, i, n, 1);
        s += part.dot(p * part);
      }
      worst = std::max(worst, s * lmax_kinv);
    }
  } else {
    for (int i = 0; i < h.N; ++i) {
      const Matrix row = h.Phi.block(i * n, 0, n, h.N);
      Matrix m = row.transpose() * p * row;
      m = 0.5 * (m + m.transpose());
      worst = std::max(worst, numerics::general_eigen_max(m, k));
    }
  }
  const double c = prefactor * worst;
  if (!(c > 0.0) || !std::isfinite(c))
    fail(ErrorCode::DegenerateInput, "constant c is not a positive finite number");
  return c;
}

SynthesisResult synthesize(const PlantModel& plant, const Matrix& q, int horizon,
                           double alpha, CInterpretation interp) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon N must be >= 1");
  SynthesisResult out;
  out.Q = q;
  out.alpha = alpha;
  out.c_interpretation = interp;

  auto ric = solve_riccati(plant, q);
  out.P = std::move(ric.P);
  out.riccati_iterations = ric.iterations;
  out.riccati_residual = ric.residual;

  out.rho = compute_rho(q, out.P);
  const HorizonData h = build_horizon(plant, q, out.P, horizon);
  out.c = compute_c(h, out.P, out.rho, interp);

  out.Eps = (alpha * (1.0 - out.rho) / out.c) * out.P;
  out.W = out.P - q + out.Eps;
  out.W = 0.5 * (out.W + out.W.transpose());
  return out;
}

std::vector<InvariantCheck> verify(const SynthesisResult& syn, const PlantModel& plant) {
  std::vector<InvariantCheck> checks;
  const double pscale = 1.0 + numerics::max_abs(syn.P);
  auto min_eig = [](const Matrix& m) {
    return numerics::sym_eigenvalues(0.5 * (m + m.transpose())).front();
  };

  const double res = riccati_residual(plant, syn.Q, syn.P);
  checks.push_back({"riccati_residual", res <= 1e-9 * pscale, res, 1e-9 * pscale});

  const double pmq = min_eig(syn.P - syn.Q);
  checks.push_back({"P_minus_Q_psd", pmq >= -1e-9 * pscale, pmq, -1e-9 * pscale});

  const double pmin = min_eig(syn.P);
  checks.push_back({"P_positive_definite", pmin > 0.0, pmin, 0.0});

  checks.push_back({"rho_in_unit_interval", syn.rho >= 0.0 && syn.rho < 1.0, syn.rho, 1.0});
  checks.push_back({"c_positive", syn.c > 0.0, syn.c, 0.0});

  const double emin = min_eig(syn.Eps);
  checks.push_back({"Eps_positive_definite", emin > 0.0, emin, 0.0});

  const double gap = min_eig((1.0 - syn.rho) * syn.P / syn.c - syn.Eps);
  checks.push_back({"Eps_below_admissible_bound", gap > 0.0, gap, 0.0});

  const double wdiff = numerics::max_abs(syn.W - (syn.P - syn.Q + syn.Eps));
  checks.push_back({"W_equals_P_minus_Q_plus_Eps", wdiff <= 1e-12 * pscale, wdiff, 1e-12 * pscale});

  const double wmin = min_eig(syn.W);
  checks.push_back({"W_positive_definite", wmin > 0.0, wmin, 0.0});
  return checks;
}

}  // namespace sppc
