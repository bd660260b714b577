#include "aisgd/stream.hpp"

#include "aisgd/core.hpp"

#include <chrono>
#include <cmath>

namespace aisgd {

std::vector<std::uint64_t> evaluation_points(std::uint64_t samples_per_pass,
                                             const StreamOptions& options) {
  if (samples_per_pass == 0) throw ValidationError("data stream is empty");
  if (options.passes < 1) throw ValidationError("passes must be at least 1");
  const std::uint64_t total = samples_per_pass * static_cast<std::uint64_t>(options.passes);
  std::vector<std::uint64_t> points;

  if (options.spacing == EvalSpacing::linear) {
    if (options.eval_every == 0) throw ValidationError("eval_every must be positive");
    for (int pass = 0; pass < options.passes; ++pass) {
      const std::uint64_t base = samples_per_pass * static_cast<std::uint64_t>(pass);
      for (std::uint64_t j = options.eval_every; j < samples_per_pass; j += options.eval_every) {
        points.push_back(base + j);
      }
      points.push_back(base + samples_per_pass);
    }
    return points;
  }

  if (options.per_decade < 1) throw ValidationError("per_decade must be positive");
  for (int k = 0;; ++k) {
    const auto n = static_cast<std::uint64_t>(
        std::llround(std::pow(10.0, static_cast<double>(k) / options.per_decade)));
    if (n >= total) break;
    if (points.empty() || n > points.back()) points.push_back(n);
  }
  points.push_back(total);
  return points;
}

StreamResult run_stream(Algorithm algorithm, const GlmLoss& loss, const LearningRate& schedule,
                        std::span<const Sample> data, const Vector& theta0,
                        const Evaluator& evaluator, const StreamOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto points = evaluation_points(data.size(), options);
  const auto started = Clock::now();

  StreamResult result;
  result.state = OptimizerState::start(algorithm, theta0);
  result.trace.reserve(points.size());

  const double adagrad_eta = schedule.rate(1);
  std::size_t next_point = 0;
  std::uint64_t consumed = 0;

  for (int pass = 0; pass < options.passes; ++pass) {
    for (const Sample& sample : data) {
      if (!result.diverged) {
        const double rate =
            algorithm == Algorithm::adagrad ? adagrad_eta : schedule.rate(result.state.n + 1);
        try {
          result.state = step(std::move(result.state), sample, rate, loss, options.fixed_point);
        } catch (const FixedPointError& e) {
          if (e.kind() != FixedPointError::Kind::no_convergence) throw;
          result.diverged = true;
        }
        if (!result.diverged && is_diverged(result.state.theta)) result.diverged = true;
        if (result.diverged) result.diverged_at = consumed + 1;
      }
      ++consumed;
      if (next_point < points.size() && consumed == points[next_point]) {
        ++next_point;
        TracePoint row;
        row.run_id = options.run_id;
        row.n = consumed;
        row.metric = evaluator(result.state.estimate());
        row.diverged = result.diverged;
        row.wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - started).count();
        result.trace.push_back(std::move(row));
      }
    }
  }
  return result;
}

}  // namespace aisgd
