#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "sppc/lifting.hpp"
#include "sppc/plant.hpp"
#include "sppc/solvers.hpp"
#include "sppc/synthesis.hpp"

namespace sppc {

/// Seedable random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; uniforms take the top 53 bits.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Erasure channel: i.i.d. drops with probability p_drop, except that after
/// `max_consecutive` successive drops the next transmission is delivered.
class ChannelModel {
 public:
  ChannelModel(double p_drop, int max_consecutive);

  /// True when the packet is delivered.
  bool step(RandomStream& rng);

  double p_drop() const noexcept { return p_drop_; }
  int max_consecutive() const noexcept { return max_consecutive_; }
  int consecutive_drops() const noexcept { return consecutive_drops_; }

 private:
  double p_drop_;
  int max_consecutive_;
  int consecutive_drops_ = 0;
};

/// Actuator-side buffer. Starts zero-filled; a delivered packet overwrites it
/// and each step consumes the next element.
class BufferState {
 public:
  explicit BufferState(int horizon);

  /// Plant input for this step. Throws BufferExhausted when no packet arrives
  /// and the stored one is used up.
  double apply(const Vector* delivered);

  const Vector& contents() const noexcept { return contents_; }
  int cursor() const noexcept { return cursor_; }

 private:
  Vector contents_;
  int cursor_ = 0;
};

enum class SolverKind { Omp, L1 };

std::string_view to_string(SolverKind s) noexcept;

struct LoopSettings {
  SolverKind solver = SolverKind::Omp;
  OmpSelection omp_selection = OmpSelection::Normalized;
  double lambda = 1.0;  // l1 weight; also recorded as the packet's fixed bound
  double p_drop = 0.5;
  int steps = 100;
};

struct StepRecord {
  int k = 0;
  Vector x;
  double norm_x = 0.0;
  double input = 0.0;
  bool dropped = false;
  int l0 = 0;
  double design_time_us = 0.0;
};

/// One record per k = 0..steps. The final record carries the state only.
struct SimTrace {
  std::vector<StepRecord> steps;
};

/// Closed networked loop for one channel realization.
SimTrace run_trial(const PlantModel& plant, const HorizonData& h, const SynthesisResult& syn,
                   const LoopSettings& settings, const Vector& x0, std::uint64_t seed);

struct TrialSummary {
  std::uint64_t seed = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double mean_l0 = 0.0;
  int drops = 0;
  int longest_drop_run = 0;
  double mean_design_time_us = 0.0;
};

struct MonteCarloResult {
  std::vector<double> mean_norm_x;  // k = 0..steps
  std::vector<double> mean_l0;      // k = 0..steps (last entry is 0: no packet)
  std::vector<TrialSummary> trials;
  double mean_design_time_us = 0.0;
};

TrialSummary summarize(const SimTrace& trace, std::uint64_t seed);

/// Trial t uses seed base_seed + t. `threads` > 1 runs trials concurrently;
/// the reduction is ordered by trial index, so results do not depend on it.
MonteCarloResult run_montecarlo(const PlantModel& plant, const HorizonData& h,
                                const SynthesisResult& syn, const LoopSettings& settings,
                                const Vector& x0, int trials, std::uint64_t base_seed,
                                int threads = 1);

}  // namespace sppc
