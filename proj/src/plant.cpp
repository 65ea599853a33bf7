#include "sppc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sppc/errors.hpp"

namespace sppc {

namespace {

constexpr double kReachabilityTol = 1e-10;
constexpr double kConjugateTol = 1e-9;

}  // namespace

PlantModel::PlantModel(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  numerics::require_square(a_, "A");
  if (a_.rows() == 0) fail(ErrorCode::DimensionMismatch, "plant must have n >= 1");
  if (b_.rows() != a_.rows() || b_.cols() != 1)
    fail(ErrorCode::DimensionMismatch,
         "B must be " + std::to_string(a_.rows()) + "x1 (scalar input)");
  numerics::require_finite(a_, "A");
  numerics::require_finite(b_, "B");
  if (b_.isZero(0.0)) fail(ErrorCode::NotReachable, "plant not reachable: B is zero");
  if (!is_reachable(a_, b_)) fail(ErrorCode::NotReachable, "plant not reachable");
}

Vector PlantModel::step(const Vector& x, double u) const {
  if (x.size() != n())
    fail(ErrorCode::DimensionMismatch, "state has length " + std::to_string(x.size()) +
                                           ", plant has n = " + std::to_string(n()));
  if (!x.allFinite() || !std::isfinite(u))
    fail(ErrorCode::NonFinite, "non-finite state or input");
  return a_ * x + b_.col(0) * u;
}

Matrix reachability_matrix(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix r(n, n);
  Vector col = b.col(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    r.col(j) = col;
    col = a * col;
  }
  return r;
}

bool is_reachable(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != 1 || a.rows() == 0)
    return false;
  if (!a.allFinite() || !b.allFinite()) return false;
  return numerics::inverse_condition(reachability_matrix(a, b)) > kReachabilityTol;
}

std::vector<double> monic_polynomial(const std::vector<std::complex<double>>& roots) {
  // Pair every complex root with a conjugate partner before expanding.
  std::vector<bool> used(roots.size(), false);
  std::vector<double> poly{1.0};
  auto multiply = [&poly](const std::vector<double>& factor) {
    std::vector<double> out(poly.size() + factor.size() - 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (std::size_t j = 0; j < factor.size(); ++j) out[i + j] += poly[i] * factor[j];
    poly = std::move(out);
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const auto r = roots[i];
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      fail(ErrorCode::NonFinite, "pole " + std::to_string(i) + " is not finite");
    const double scale = std::max(1.0, std::abs(r));
    if (std::abs(r.imag()) <= kConjugateTol * scale) {
      used[i] = true;
      multiply({1.0, -r.real()});
      continue;
    }
    std::size_t partner = roots.size();
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - std::conj(r)) <= kConjugateTol * scale) {
        partner = j;
        break;
      }
    }
    if (partner == roots.size())
      fail(ErrorCode::NonConjugatePoles,
           "pole " + std::to_string(i) + " has no conjugate partner");
    used[i] = used[partner] = true;
    multiply({1.0, -2.0 * r.real(), std::norm(r)});
  }
  return poly;
}

PlantModel PlantModel::from_poles(const std::vector<std::complex<double>>& poles) {
  if (poles.empty()) fail(ErrorCode::DimensionMismatch, "at least one pole required");
  const auto poly = monic_polynomial(poles);
  const auto n = static_cast<Eigen::Index>(poles.size());
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  // z^n + c1 z^{n-1} + ... + cn: last row is [-cn, ..., -c1].
  for (Eigen::Index j = 0; j < n; ++j) a(n - 1, j) = -poly[static_cast<std::size_t>(n - j)];
  Matrix b = Matrix::Zero(n, 1);
  b(n - 1, 0) = 1.0;
  return PlantModel(std::move(a), std::move(b));
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  numerics::require_square(a, "A");
  numerics::require_finite(a, "A");
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::NoConvergence, "eigenvalue iteration did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace sppc
