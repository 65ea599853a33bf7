#pragma once

// Dense double-precision helpers for the small matrices used throughout the
// library (state dimension up to ~20, horizon up to ~64).

#include <Eigen/Dense>
#include <string_view>
#include <vector>

namespace sppc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

inline constexpr double kSymmetryTol = 1e-10;

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, std::string_view what);
void require_square(const Matrix& m, std::string_view what);
void require_symmetric(const Matrix& m, std::string_view what);

double max_abs(const Matrix& m);

/// Lower-triangular L with L*L^T = S. Throws NotPositiveDefinite if any pivot
/// falls at or below 1e-14 * max|S|, NonSymmetric if S is not symmetric.
Matrix cholesky(const Matrix& s);

/// Eigenvalues of a symmetric matrix in ascending order.
std::vector<double> sym_eigenvalues(const Matrix& s);

/// u minimizing ||m*u - y||_2 for m of full column rank.
Vector solve_least_squares(const Matrix& m, const Vector& y);

/// Smallest singular value over the largest; 0 for an all-zero matrix.
double inverse_condition(const Matrix& m);

/// lambda_min(Q P^-1), evaluated on the congruence L^-1 Q L^-T with P = L L^T.
double general_eigen_min(const Matrix& q, const Matrix& p);

/// lambda_max(M K^-1) for symmetric M and SPD K, via the same congruence.
double general_eigen_max(const Matrix& m, const Matrix& k);

}  // namespace numerics
}  // namespace sppc
