#include "sppc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sppc/errors.hpp"

namespace sppc {

std::string_view to_string(OmpSelection s) noexcept {
  return s == OmpSelection::Normalized ? "normalized" : "unnormalized";
}

OmpSelection omp_selection_from_string(std::string_view s) {
  if (s == "normalized") return OmpSelection::Normalized;
  if (s == "unnormalized") return OmpSelection::Unnormalized;
  fail(ErrorCode::Config, "unknown omp_selection '" + std::string(s) + "'");
}

namespace {

void check_inputs(const HorizonData& h, const Matrix& w, const Vector& x) {
  if (x.size() != h.n) fail(ErrorCode::DimensionMismatch, "state length differs from plant order");
  if (w.rows() != h.n || w.cols() != h.n) fail(ErrorCode::DimensionMismatch, "W must be n x n");
  if (!x.allFinite()) fail(ErrorCode::NonFinite, "state has non-finite entries");
}

Matrix columns(const Matrix& g, const std::vector<int>& idx) {
  Matrix out(g.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = g.col(idx[j]);
  return out;
}

// Solves on columns `idx`, scatters into a length-N vector, returns |r|^2.
double refit(const Matrix& g, const Vector& y, const std::vector<int>& idx, Vector& coeffs) {
  coeffs.setZero();
  if (idx.empty()) return y.squaredNorm();
  const Matrix gs = columns(g, idx);
  const Vector us = numerics::solve_least_squares(gs, y);
  for (std::size_t j = 0; j < idx.size(); ++j) coeffs(idx[j]) = us(static_cast<Eigen::Index>(j));
  return (y - gs * us).squaredNorm();
}

bool exceeds_full_support_slack(double residual_sq, double eps) {
  return residual_sq > eps * (1.0 + kInfeasibleRelTol);
}

[[noreturn]] void infeasible(double residual_sq, double eps) {
  fail(ErrorCode::Infeasible, "full-support residual " + std::to_string(residual_sq) +
                                  " exceeds x^T W x = " + std::to_string(eps));
}

// OMP and the exhaustive search are scale covariant, so both work on x / max|x|
// and rescale; this keeps |r|^2 and x^T W x clear of underflow as x -> 0.
struct Normalized {
  double scale;
  Vector x;
};

Normalized normalize(const Vector& x) {
  const double s = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  return {s, s > 0.0 ? Vector(x / s) : x};
}

void rescale(ControlPacket& pkt, double s) {
  pkt.coeffs *= s;
  pkt.residual_sq *= s * s;
  pkt.threshold *= s * s;
}

ControlPacket zero_packet(int horizon) {
  ControlPacket pkt;
  pkt.coeffs = Vector::Zero(horizon);
  return pkt;
}

}  // namespace

ControlPacket omp_design(const HorizonData& h, const Matrix& w, const Vector& x,
                         OmpSelection selection, OmpDiagnostics* diag) {
  check_inputs(h, w, x);
  if (diag) *diag = {};
  const auto [scale, xs] = normalize(x);
  ControlPacket pkt = zero_packet(h.N);
  if (scale == 0.0) {
    if (diag) diag->residual_history.push_back(0.0);
    return pkt;
  }

  const Vector y = h.H * xs;
  const double eps = xs.dot(w * xs);
  Vector col_norm = h.G.colwise().norm().transpose();
  if (selection == OmpSelection::Unnormalized) col_norm.setOnes();

  std::vector<bool> chosen(static_cast<std::size_t>(h.N), false);
  std::vector<int> order;
  Vector r = y;
  double rsq = r.squaredNorm();
  if (diag) diag->residual_history.push_back(rsq);

  while (rsq > eps && static_cast<int>(order.size()) < h.N) {
    const Vector corr = h.G.transpose() * r;
    int best = -1;
    double best_score = -1.0;
    for (int i = 0; i < h.N; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      const double score = std::abs(corr(i)) / col_norm(i);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    chosen[static_cast<std::size_t>(best)] = true;
    order.push_back(best);

    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    rsq = refit(h.G, y, sorted, pkt.coeffs);
    r = y - h.G * pkt.coeffs;
    if (diag) diag->residual_history.push_back(rsq);
  }

  if (rsq > eps && exceeds_full_support_slack(rsq, eps)) infeasible(rsq, eps);

  pkt.support = order;
  std::sort(pkt.support.begin(), pkt.support.end());
  pkt.residual_sq = rsq;
  pkt.threshold = eps;
  pkt.iterations = static_cast<int>(order.size());
  if (diag) diag->selection_order = order;
  rescale(pkt, scale);
  if (diag)
    for (double& v : diag->residual_history) v *= scale * scale;
  return pkt;
}

ControlPacket exhaustive_design(const HorizonData& h, const Matrix& w, const Vector& x,
                                int max_n) {
  check_inputs(h, w, x);
  if (max_n > kExhaustiveMaxN || h.N > max_n)
    fail(ErrorCode::InvalidArgument, "exhaustive search limited to N <= " +
                                         std::to_string(std::min(max_n, kExhaustiveMaxN)));
  const auto [scale, xs] = normalize(x);
  ControlPacket pkt = zero_packet(h.N);
  if (scale == 0.0) return pkt;

  const Vector y = h.H * xs;
  const double eps = xs.dot(w * xs);
  Vector coeffs(h.N);
  int visited = 0;
  double last_rsq = 0.0;

  for (int k = 0; k <= h.N; ++k) {
    // Lexicographic k-subsets of {0, ..., N-1}.
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      ++visited;
      const double rsq = refit(h.G, y, idx, coeffs);
      last_rsq = rsq;
      if (rsq <= eps) {
        pkt.coeffs = coeffs;
        pkt.support = idx;
        pkt.residual_sq = rsq;
        pkt.threshold = eps;
        pkt.iterations = visited;
        rescale(pkt, scale);
        return pkt;
      }
      int pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == h.N - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int j = pos + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  // Only the full support remains; accept it within the round-off slack.
  if (exceeds_full_support_slack(last_rsq, eps)) infeasible(last_rsq, eps);
  pkt.coeffs = coeffs;
  pkt.support.resize(static_cast<std::size_t>(h.N));
  std::iota(pkt.support.begin(), pkt.support.end(), 0);
  pkt.residual_sq = last_rsq;
  pkt.threshold = eps;
  pkt.iterations = visited;
  rescale(pkt, scale);
  return pkt;
}

ControlPacket l1_design(const HorizonData& h, const Vector& x, double lambda,
                        double fixed_bound) {
  if (x.size() != h.n) fail(ErrorCode::DimensionMismatch, "state length differs from plant order");
  if (!x.allFinite()) fail(ErrorCode::NonFinite, "state has non-finite entries");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::InvalidArgument, "lambda must be positive");

  const Vector y = h.H * x;
  const Matrix gtg = h.G.transpose() * h.G;
  const Vector gty = h.G.transpose() * y;
  const double lip = numerics::sym_eigenvalues(gtg).back();
  const double step = 1.0 / lip;
  const double kill = lambda * step;

  auto objective = [&](const Vector& u) {
    return lambda * u.lpNorm<1>() + 0.5 * (h.G * u - y).squaredNorm();
  };
  auto prox_grad = [&](const Vector& z) {
    const Vector v = z - step * (gtg * z - gty);
    return Vector(v.array().sign() * (v.array().abs() - kill).max(0.0));
  };

  // FISTA with function-value restart.
  Vector u = Vector::Zero(h.N);
  Vector z = u;
  double t = 1.0;
  double obj = objective(u);
  int it = 0;
  bool converged = false;
  while (it < kL1MaxIterations) {
    ++it;
    Vector next = prox_grad(z);
    double next_obj = objective(next);
    if (next_obj > obj) {
      // Momentum overshoot: restart from a plain proximal step at u.
      t = 1.0;
      next = prox_grad(u);
      next_obj = objective(next);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - u);
    t = t_next;
    const double change = std::abs(obj - next_obj);
    u = std::move(next);
    obj = next_obj;
    if (change <= kL1RelTol * std::abs(obj)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorCode::NoConvergence, "l1 proximal gradient did not converge in " +
                                       std::to_string(kL1MaxIterations) + " iterations");

  ControlPacket pkt;
  const double peak = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) < kL1ZeroTol * peak || u(i) == 0.0)
      u(i) = 0.0;
    else
      pkt.support.push_back(static_cast<int>(i));
  }
  pkt.residual_sq = (h.G * u - y).squaredNorm();
  pkt.coeffs = std::move(u);
  pkt.threshold = fixed_bound;
  pkt.iterations = it;
  return pkt;
}

}  // namespace sppc
