#pragma once

#include <complex>
#include <vector>

#include "sppc/numerics.hpp"

namespace sppc {

/// Discrete-time LTI plant x(k+1) = A x(k) + B u(k) with a scalar input.
///
/// Construction validates dimensions, finiteness, B != 0 and reachability of
/// (A, B); a PlantModel that exists is always usable by the synthesis code.
class PlantModel {
 public:
  PlantModel(Matrix a, Matrix b);

  /// Controllable canonical form whose characteristic polynomial has the
  /// given roots: A is the companion matrix (ones on the superdiagonal, last
  /// row holds the negated polynomial coefficients), B = e_n.
  static PlantModel from_poles(const std::vector<std::complex<double>>& poles);

  const Matrix& A() const noexcept { return a_; }
  const Matrix& B() const noexcept { return b_; }
  Eigen::Index n() const noexcept { return a_.rows(); }

  Vector step(const Vector& x, double u) const;

 private:
  Matrix a_;
  Matrix b_;
};

/// [B, AB, ..., A^{n-1}B].
Matrix reachability_matrix(const Matrix& a, const Matrix& b);

/// Full rank test on the reachability matrix: sigma_min > 1e-10 * sigma_max.
bool is_reachable(const Matrix& a, const Matrix& b);
inline bool is_reachable(const PlantModel& plant) {
  return is_reachable(plant.A(), plant.B());
}

/// Real monic polynomial coefficients [1, c1, ..., cn] for the given roots,
/// highest degree first. Roots must be closed under conjugation.
std::vector<double> monic_polynomial(const std::vector<std::complex<double>>& roots);

/// Eigenvalues of A (general, possibly complex).
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

}  // namespace sppc
