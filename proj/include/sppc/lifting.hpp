#pragma once

#include "sppc/numerics.hpp"
#include "sppc/plant.hpp"

namespace sppc {

/// Horizon-N prediction matrices. For the stacked predicted states
/// X = [x_1; ...; x_N] driven by packet u from state x:
///   X = Phi u + Upsilon x,
/// and the weighted cost sum_{i=1}^{N-1} |x_i|_Q^2 + |x_N|_P^2 = |G u - H x|^2.
struct HorizonData {
  int N = 0;
  Eigen::Index n = 0;
  Matrix Phi;      // nN x N, block (i,j) = A^{i-j} B for i >= j
  Matrix Upsilon;  // nN x n, stacks A, A^2, ..., A^N
  Matrix Qbar;     // blockdiag{Q, ..., Q, P}, N-1 copies of Q
  Matrix Qbar_sqrt;  // blockdiag{R_Q, ..., R_P} with R^T R = block
  Matrix G;        // Qbar_sqrt * Phi
  Matrix H;        // -Qbar_sqrt * Upsilon
};

HorizonData build_horizon(const PlantModel& plant, const Matrix& q, const Matrix& p, int horizon);

/// |G u - H x|_2^2.
double stage_cost(const HorizonData& h, const Vector& u, const Vector& x);

}  // namespace sppc
