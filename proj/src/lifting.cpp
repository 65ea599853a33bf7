#include "sppc/lifting.hpp"

#include <string>

#include "sppc/errors.hpp"

namespace sppc {

HorizonData build_horizon(const PlantModel& plant, const Matrix& q, const Matrix& p,
                          int horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon N must be >= 1");
  const Eigen::Index n = plant.n();
  if (q.rows() != n || q.cols() != n || p.rows() != n || p.cols() != n)
    fail(ErrorCode::DimensionMismatch, "Q and P must be " + std::to_string(n) + "x" +
                                           std::to_string(n));
  // Upper factors R with R^T R = block.
  const Matrix rq = numerics::cholesky(q).transpose();
  const Matrix rp = numerics::cholesky(p).transpose();

  const Eigen::Index N = horizon;
  HorizonData h;
  h.N = horizon;
  h.n = n;
  h.Phi = Matrix::Zero(n * N, N);
  h.Upsilon = Matrix::Zero(n * N, n);
  h.Qbar = Matrix::Zero(n * N, n * N);
  h.Qbar_sqrt = Matrix::Zero(n * N, n * N);

  // powers_b[k] = A^k B
  std::vector<Vector> powers_b;
  powers_b.reserve(static_cast<std::size_t>(N));
  Vector ab = plant.B().col(0);
  Matrix apow = plant.A();
  for (Eigen::Index i = 0; i < N; ++i) {
    powers_b.push_back(ab);
    ab = plant.A() * ab;
    h.Upsilon.block(i * n, 0, n, n) = apow;
    apow = plant.A() * apow;
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j)
      h.Phi.block(i * n, j, n, 1) = powers_b[static_cast<std::size_t>(i - j)];
    const bool terminal = (i == N - 1);
    h.Qbar.block(i * n, i * n, n, n) = terminal ? p : q;
    h.Qbar_sqrt.block(i * n, i * n, n, n) = terminal ? rp : rq;
  }
  h.G = h.Qbar_sqrt * h.Phi;
  h.H = -h.Qbar_sqrt * h.Upsilon;
  return h;
}

double stage_cost(const HorizonData& h, const Vector& u, const Vector& x) {
  if (u.size() != h.N || x.size() != h.n)
    fail(ErrorCode::DimensionMismatch, "stage_cost: packet or state length mismatch");
  return (h.G * u - h.H * x).squaredNorm();
}

}  // namespace sppc
