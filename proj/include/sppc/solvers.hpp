#pragma once

#include <string_view>
#include <vector>

#include "sppc/lifting.hpp"
#include "sppc/numerics.hpp"

namespace sppc {

/// A control packet u(x(k)) = [u_0, ..., u_{N-1}] with its support.
struct ControlPacket {
  Vector coeffs;
  std::vector<int> support;  // sorted, indices of nonzero coefficients
  double residual_sq = 0.0;  // |G coeffs - H x|^2
  double threshold = 0.0;    // x^T W x (OMP, exhaustive) or the fixed bound (l1)
  int iterations = 0;

  int l0() const noexcept { return static_cast<int>(support.size()); }
};

/// Column selection rule for OMP.
enum class OmpSelection { Normalized, Unnormalized };

std::string_view to_string(OmpSelection s) noexcept;
OmpSelection omp_selection_from_string(std::string_view s);

struct OmpDiagnostics {
  std::vector<int> selection_order;
  std::vector<double> residual_history;  // |r|^2 before the first and after each selection
};

/// Relative slack on x^T W x tolerated at full support before Infeasible is raised.
inline constexpr double kInfeasibleRelTol = 1e-7;

/// Greedy sparse packet: grows the support one column of G at a time, refitting
/// by least squares, until |G u - H x|^2 <= x^T W x.
ControlPacket omp_design(const HorizonData& h, const Matrix& w, const Vector& x,
                         OmpSelection selection = OmpSelection::Normalized,
                         OmpDiagnostics* diag = nullptr);

inline constexpr int kExhaustiveMaxN = 12;

/// Globally sparsest feasible packet by enumerating supports in order of
/// increasing size, lexicographic within a size.
ControlPacket exhaustive_design(const HorizonData& h, const Matrix& w, const Vector& x,
                                int max_n = kExhaustiveMaxN);

inline constexpr int kL1MaxIterations = 5000;
inline constexpr double kL1RelTol = 1e-10;
inline constexpr double kL1ZeroTol = 1e-9;

/// Baseline packet: argmin lambda |u|_1 + 1/2 |G u - H x|^2 by accelerated
/// proximal gradient. `fixed_bound` is recorded as the packet threshold.
ControlPacket l1_design(const HorizonData& h, const Vector& x, double lambda,
                        double fixed_bound);

}  // namespace sppc
