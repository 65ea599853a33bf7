#include <doctest.h>

#include <cmath>

#include "sppc/errors.hpp"
#include "sppc/numerics.hpp"
#include "test_util.hpp"

using namespace sppc;
using sppc::testing::Gen;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an sppc::Error");
  return ErrorCode::InvalidArgument;
}

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST_CASE("cholesky examples") {
  CHECK(numerics::cholesky(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  CHECK(numerics::cholesky(mat({{4}}))(0, 0) == doctest::Approx(2.0));
  const Matrix l = numerics::cholesky(mat({{4, 2}, {2, 5}}));
  CHECK(numerics::max_abs(l - mat({{2, 0}, {1, 2}})) < 1e-15);
  CHECK(numerics::max_abs(l * l.transpose() - mat({{4, 2}, {2, 5}})) < 1e-14);
}

TEST_CASE("cholesky rejects indefinite and non-symmetric input") {
  CHECK(code_of([] { numerics::cholesky(mat({{1, 2}, {2, 1}})); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([] { numerics::cholesky(mat({{1, 0}, {0, 0}})); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([] { numerics::cholesky(mat({{2, 1}, {0, 2}})); }) == ErrorCode::NonSymmetric);
}

TEST_CASE("cholesky round trip on random SPD matrices") {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix s = gen.spd(gen.integer(1, 12));
    const Matrix l = numerics::cholesky(s);
    CHECK(l.isLowerTriangular());
    CHECK(numerics::max_abs(l * l.transpose() - s) <= 1e-10 * (1.0 + numerics::max_abs(s)));
  }
}

TEST_CASE("sym_eigenvalues examples") {
  auto ev = numerics::sym_eigenvalues(Matrix::Identity(2, 2));
  CHECK(ev == std::vector<double>{1.0, 1.0});
  ev = numerics::sym_eigenvalues(mat({{2, 0}, {0, 3}}));
  CHECK(ev[0] == doctest::Approx(2.0));
  CHECK(ev[1] == doctest::Approx(3.0));
  // Characteristic polynomial l^2 - 6 l + 1.
  ev = numerics::sym_eigenvalues(mat({{1, -2}, {-2, 5}}));
  CHECK(std::abs(ev[0] - (3.0 - 2.0 * std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(ev[1] - (3.0 + 2.0 * std::sqrt(2.0))) < 1e-14);
  CHECK(code_of([] { numerics::sym_eigenvalues(mat({{1, 1}, {0, 1}})); }) == ErrorCode::NonSymmetric);
}

TEST_CASE("sym_eigenvalues: characteristic identity and similarity invariance") {
  Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(1, 8);
    const Matrix m = gen.matrix(n, n);
    const Matrix s = 0.5 * (m + m.transpose());
    const auto ev = numerics::sym_eigenvalues(s);
    REQUIRE(ev.size() == static_cast<std::size_t>(n));
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    const double scale = std::pow(1.0 + numerics::max_abs(s), static_cast<double>(n));
    for (double l : ev) {
      // det(S - l I) via LU; independent of the eigensolver.
      const double det = (s - l * Matrix::Identity(n, n)).determinant();
      CHECK(std::abs(det) <= 1e-8 * scale);
    }
    const Matrix t = gen.orthogonal(n);
    const Matrix sim = t.transpose() * s * t;
    const auto ev2 = numerics::sym_eigenvalues(0.5 * (sim + sim.transpose()));
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(std::abs(ev[static_cast<std::size_t>(i)] - ev2[static_cast<std::size_t>(i)]) <= 1e-8);
  }
}

TEST_CASE("solve_least_squares examples") {
  Vector y(2);
  y << 3, 7;
  CHECK(numerics::max_abs(numerics::solve_least_squares(Matrix::Identity(2, 2), y) - y) < 1e-15);

  Vector y2(2);
  y2 << -2, -4;
  const Vector u1 = numerics::solve_least_squares(mat({{1}, {2}}), y2);
  CHECK(u1(0) == doctest::Approx(-2.0).epsilon(1e-14));

  const Vector u2 = numerics::solve_least_squares(mat({{1, 0}, {2, 1}}), y2);
  CHECK(u2(0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(u2(1)) < 1e-14);
}

TEST_CASE("solve_least_squares errors") {
  Vector y(2);
  y << 1, 1;
  CHECK(code_of([&] { numerics::solve_least_squares(mat({{1, 1}, {1, 1}}), y); }) == ErrorCode::RankDeficient);
  CHECK(code_of([&] { numerics::solve_least_squares(mat({{1, 1, 0}, {1, 0, 1}}), y); }) == ErrorCode::RankDeficient);
  CHECK(code_of([&] { numerics::solve_least_squares(mat({{1}, {2}, {3}}), y); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("solve_least_squares: normal equations and square solves") {
  Gen gen(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index cols = gen.integer(1, 8);
    const Eigen::Index rows = cols + gen.integer(0, 10);
    const Matrix m = gen.matrix(rows, cols);
    const Vector y = gen.vector(rows);
    const Vector u = numerics::solve_least_squares(m, y);
    const double normal = (m.transpose() * (m * u - y)).norm();
    CHECK(normal <= 1e-8 * (1.0 + (m.transpose() * y).norm()));

    const Matrix sq = gen.matrix(cols, cols) + 3.0 * Matrix::Identity(cols, cols);
    const Vector rhs = gen.vector(cols);
    const Vector direct = sq.partialPivLu().solve(rhs);
    CHECK(numerics::max_abs(numerics::solve_least_squares(sq, rhs) - direct) <= 1e-10 * (1.0 + numerics::max_abs(direct)));
  }
}

TEST_CASE("general_eigen_min examples") {
  const Matrix p = mat({{3, 1}, {1, 2}});
  CHECK(numerics::general_eigen_min(p, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(numerics::general_eigen_min(Matrix::Identity(3, 3), 2.0 * Matrix::Identity(3, 3)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(numerics::general_eigen_min(mat({{1, 0}, {0, 2}}), mat({{2, 0}, {0, 2}})) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(code_of([] { numerics::general_eigen_min(Matrix::Identity(2, 2), mat({{1, 2}, {2, 1}})); }) ==
        ErrorCode::NotPositiveDefinite);
}

TEST_CASE("general_eigen_min agrees with the eigenvalues of Q P^-1") {
  Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const Matrix q = gen.spd(n), p = gen.spd(n);
    // Oracle: general (nonsymmetric) eigensolver on the explicit product.
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(q * p.inverse()).eigenvalues();
    double lmin = ev.real().minCoeff();
    CHECK(ev.imag().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(numerics::general_eigen_min(q, p) == doctest::Approx(lmin).epsilon(1e-9));
  }
}
