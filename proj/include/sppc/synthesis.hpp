#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sppc/lifting.hpp"
#include "sppc/numerics.hpp"
#include "sppc/plant.hpp"

namespace sppc {

/// How the per-column term of the constant c is formed.
///  - ColumnLift: Phi_i is the i-th column of Phi (an nN-vector) and P acts
///    blockwise as I_N (x) P, giving a scalar s_i times lambda_max((Phi^T Qbar Phi)^-1).
///  - BlockRow: Phi_i is the i-th block row of Phi (n x N) and the term is
///    lambda_max(Phi_i^T P Phi_i (Phi^T Qbar Phi)^-1).
enum class CInterpretation { ColumnLift, BlockRow };

std::string_view to_string(CInterpretation c) noexcept;
CInterpretation c_interpretation_from_string(std::string_view s);

struct RiccatiSolution {
  Matrix P;
  int iterations = 0;
  double residual = 0.0;  // max-norm of the fixed-point residual
};

struct SynthesisResult {
  Matrix Q;
  Matrix P;
  double rho = 0.0;
  double c = 0.0;
  Matrix Eps;
  Matrix W;
  double alpha = 0.5;
  CInterpretation c_interpretation = CInterpretation::ColumnLift;
  int riccati_iterations = 0;
  double riccati_residual = 0.0;
};

struct InvariantCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

inline constexpr int kRiccatiMaxIterations = 100000;
inline constexpr double kRiccatiRelTol = 1e-12;

/// Max-norm of A^T P A - A^T P B (B^T P B)^-1 B^T P A + Q - P.
double riccati_residual(const PlantModel& plant, const Matrix& q, const Matrix& p);

/// Cheap-control Riccati solution by value iteration from P_0 = Q.
RiccatiSolution solve_riccati(const PlantModel& plant, const Matrix& q);

/// 1 - lambda_min(Q P^-1), clamped at 0 against round-off.
double compute_rho(const Matrix& q, const Matrix& p);

/// (1 - rho^N) / (1 - rho).
double geometric_prefactor(double rho, int horizon);

double compute_c(const HorizonData& h, const Matrix& p, double rho,
                 CInterpretation interp = CInterpretation::ColumnLift);

/// Full parameter selection: P from the Riccati equation, rho, c,
/// Eps = alpha (1 - rho) P / c, W = P - Q + Eps.
SynthesisResult synthesize(const PlantModel& plant, const Matrix& q, int horizon,
                           double alpha = 0.5,
                           CInterpretation interp = CInterpretation::ColumnLift);

/// Evaluates every SynthesisResult invariant; used by tests and the manifest.
std::vector<InvariantCheck> verify(const SynthesisResult& syn, const PlantModel& plant);

}  // namespace sppc
