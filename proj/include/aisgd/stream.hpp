#pragma once

#include "aisgd/features.hpp"
#include "aisgd/loss.hpp"
#include "aisgd/schedule.hpp"
#include "aisgd/solver.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace aisgd {

struct TracePoint {
  std::string run_id;
  std::uint64_t n = 0;
  double metric = 0.0;
  bool diverged = false;
  double wall_ms = 0.0;
};

using Evaluator = std::function<double(const Vector&)>;

enum class EvalSpacing { linear, log };

struct StreamOptions {
  std::string run_id;
  std::uint64_t eval_every = 1;
  /// linear: every eval_every samples plus the last one of each pass.
  /// log: `per_decade` geometrically spaced counts per power of ten, plus
  /// the last sample.
  EvalSpacing spacing = EvalSpacing::linear;
  int per_decade = 20;
  int passes = 1;
  FixedPointOptions fixed_point;
};

struct StreamResult {
  std::vector<TracePoint> trace;
  OptimizerState state;
  bool diverged = false;
  /// Sample count at which divergence was first detected, 0 if never.
  std::uint64_t diverged_at = 0;
};

/// Drives `algorithm` over `data` (in order, `passes` times) from theta0 and
/// evaluates the reported estimate on the configured grid. Divergence does
/// not abort: the iterate is frozen and remaining rows carry the flag.
StreamResult run_stream(Algorithm algorithm, const GlmLoss& loss, const LearningRate& schedule,
                        std::span<const Sample> data, const Vector& theta0,
                        const Evaluator& evaluator, const StreamOptions& options);

/// Sample counts at which run_stream evaluates, strictly increasing.
std::vector<std::uint64_t> evaluation_points(std::uint64_t samples_per_pass,
                                             const StreamOptions& options);

}  // namespace aisgd
