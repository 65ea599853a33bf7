#include "sppc/netsim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "sppc/errors.hpp"

namespace sppc {

std::string_view to_string(SolverKind s) noexcept { return s == SolverKind::Omp ? "omp" : "l1"; }

ChannelModel::ChannelModel(double p_drop, int max_consecutive)
    : p_drop_(p_drop), max_consecutive_(max_consecutive) {
  if (!(p_drop >= 0.0 && p_drop <= 1.0))
    fail(ErrorCode::InvalidArgument, "p_drop must lie in [0, 1]");
  if (max_consecutive < 0) fail(ErrorCode::InvalidArgument, "max_consecutive must be >= 0");
}

bool ChannelModel::step(RandomStream& rng) {
  if (consecutive_drops_ >= max_consecutive_) {
    consecutive_drops_ = 0;
    return true;
  }
  if (rng.uniform() < p_drop_) {
    ++consecutive_drops_;
    return false;
  }
  consecutive_drops_ = 0;
  return true;
}

BufferState::BufferState(int horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "buffer length must be >= 1");
  contents_ = Vector::Zero(horizon);
}

double BufferState::apply(const Vector* delivered) {
  if (delivered) {
    if (delivered->size() != contents_.size())
      fail(ErrorCode::DimensionMismatch, "packet length differs from buffer length");
    contents_ = *delivered;
    cursor_ = 0;
  } else if (cursor_ > contents_.size() - 1) {
    fail(ErrorCode::BufferExhausted,
         "buffer exhausted: more than " + std::to_string(contents_.size() - 1) +
             " consecutive dropouts");
  }
  return contents_(cursor_++);
}

SimTrace run_trial(const PlantModel& plant, const HorizonData& h, const SynthesisResult& syn,
                   const LoopSettings& settings, const Vector& x0, std::uint64_t seed) {
  if (settings.steps < 0) fail(ErrorCode::InvalidArgument, "steps must be >= 0");
  if (x0.size() != plant.n())
    fail(ErrorCode::DimensionMismatch, "x0 length differs from plant order");
  if (h.n != plant.n()) fail(ErrorCode::DimensionMismatch, "horizon data built for another plant");

  RandomStream rng(seed);
  ChannelModel channel(settings.p_drop, h.N - 1);
  BufferState buffer(h.N);
  SimTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(settings.steps) + 1);

  Vector x = x0;
  for (int k = 0; k <= settings.steps; ++k) {
    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.norm_x = x.stableNorm();
    if (k == settings.steps) {
      trace.steps.push_back(std::move(rec));
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const ControlPacket pkt =
        settings.solver == SolverKind::Omp
            ? omp_design(h, syn.W, x, settings.omp_selection)
            : l1_design(h, x, settings.lambda, settings.lambda);
    const auto t1 = std::chrono::steady_clock::now();
    rec.design_time_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    rec.l0 = pkt.l0();

    const bool delivered = channel.step(rng);
    rec.dropped = !delivered;
    rec.input = buffer.apply(delivered ? &pkt.coeffs : nullptr);
    x = plant.step(x, rec.input);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

TrialSummary summarize(const SimTrace& trace, std::uint64_t seed) {
  TrialSummary s;
  s.seed = seed;
  if (trace.steps.empty()) return s;
  s.initial_norm = trace.steps.front().norm_x;
  s.final_norm = trace.steps.back().norm_x;
  const std::size_t designed = trace.steps.size() - 1;
  int run = 0;
  double l0_sum = 0.0;
  double time_sum = 0.0;
  for (std::size_t i = 0; i < designed; ++i) {
    const auto& r = trace.steps[i];
    l0_sum += r.l0;
    time_sum += r.design_time_us;
    if (r.dropped) {
      ++s.drops;
      s.longest_drop_run = std::max(s.longest_drop_run, ++run);
    } else {
      run = 0;
    }
  }
  if (designed > 0) {
    s.mean_l0 = l0_sum / static_cast<double>(designed);
    s.mean_design_time_us = time_sum / static_cast<double>(designed);
  }
  return s;
}

MonteCarloResult run_montecarlo(const PlantModel& plant, const HorizonData& h,
                                const SynthesisResult& syn, const LoopSettings& settings,
                                const Vector& x0, int trials, std::uint64_t base_seed,
                                int threads) {
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
  threads = std::clamp(threads, 1, trials);

  std::vector<SimTrace> traces(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::exception_ptr error;
  int error_trial = trials;
  std::mutex error_mutex;

  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        traces[static_cast<std::size_t>(t)] =
            run_trial(plant, h, syn, settings, x0, base_seed + static_cast<std::uint64_t>(t));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the lowest failing trial so the error is independent of scheduling.
        if (t < error_trial) {
          error_trial = t;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  const std::size_t len = static_cast<std::size_t>(settings.steps) + 1;
  MonteCarloResult out;
  out.mean_norm_x.assign(len, 0.0);
  out.mean_l0.assign(len, 0.0);
  double time_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto& tr = traces[static_cast<std::size_t>(t)];
    for (std::size_t k = 0; k < len; ++k) {
      out.mean_norm_x[k] += tr.steps[k].norm_x;
      out.mean_l0[k] += tr.steps[k].l0;
    }
    out.trials.push_back(summarize(tr, base_seed + static_cast<std::uint64_t>(t)));
    time_sum += out.trials.back().mean_design_time_us;
  }
  const double inv = 1.0 / trials;
  for (std::size_t k = 0; k < len; ++k) {
    out.mean_norm_x[k] *= inv;
    out.mean_l0[k] *= inv;
  }
  out.mean_design_time_us = time_sum * inv;
  return out;
}

}  // namespace sppc
