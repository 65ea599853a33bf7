#include "sppc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sppc/errors.hpp"

namespace sppc::numerics {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite())
    fail(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + " must be square, got " + std::to_string(m.rows()) +
             "x" + std::to_string(m.cols()));
}

void require_symmetric(const Matrix& m, std::string_view what) {
  require_square(m, what);
  require_finite(m, what);
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    fail(ErrorCode::NonSymmetric, std::string(what) + " is not symmetric");
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix cholesky(const Matrix& s) {
  require_symmetric(s, "cholesky input");
  const Eigen::Index n = s.rows();
  const double floor = 1e-14 * max_abs(s);
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = s(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor) || pivot <= 0.0)
      fail(ErrorCode::NotPositiveDefinite,
           "matrix is not positive definite (pivot " + std::to_string(j) +
               " = " + std::to_string(pivot) + ")");
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (s(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
  }
  return l;
}

std::vector<double> sym_eigenvalues(const Matrix& s) {
  require_symmetric(s, "eigenvalue input");
  if (s.size() == 0) return {};
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::NoConvergence, "symmetric eigensolver did not converge");
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

double inverse_condition(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  if (largest == 0.0) return 0.0;
  return sv(sv.size() - 1) / largest;
}

Vector solve_least_squares(const Matrix& m, const Vector& y) {
  if (m.rows() != y.size())
    fail(ErrorCode::DimensionMismatch, "least squares: row count differs from rhs length");
  if (m.rows() < m.cols() || m.cols() == 0)
    fail(ErrorCode::RankDeficient, "least squares: need rows >= cols >= 1");
  require_finite(m, "least squares matrix");
  require_finite(y, "least squares rhs");
  if (!(inverse_condition(m) > 1e-12))
    fail(ErrorCode::RankDeficient, "least squares matrix is (numerically) rank deficient");
  return m.colPivHouseholderQr().solve(y);
}

namespace {

// L^-1 M L^-T for P = L L^T, symmetrized against round-off.
Matrix congruence(const Matrix& m, const Matrix& p) {
  const Matrix l = cholesky(p);
  const auto tri = l.triangularView<Eigen::Lower>();
  Matrix t = tri.solve(m);                               // L^-1 M
  Matrix c = tri.solve(t.transpose()).transpose();       // (L^-1 (L^-1 M)^T)^T
  return 0.5 * (c + c.transpose());
}

}  // namespace

double general_eigen_min(const Matrix& q, const Matrix& p) {
  require_symmetric(q, "Q");
  require_symmetric(p, "P");
  if (q.rows() != p.rows())
    fail(ErrorCode::DimensionMismatch, "Q and P differ in dimension");
  cholesky(q);  // Q must itself be positive definite
  return sym_eigenvalues(congruence(q, p)).front();
}

double general_eigen_max(const Matrix& m, const Matrix& k) {
  require_symmetric(m, "M");
  require_symmetric(k, "K");
  if (m.rows() != k.rows())
    fail(ErrorCode::DimensionMismatch, "M and K differ in dimension");
  return sym_eigenvalues(congruence(m, k)).back();
}

}  // namespace sppc::numerics
