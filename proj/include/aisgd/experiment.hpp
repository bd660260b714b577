#pragma once

#include "aisgd/config.hpp"
#include "aisgd/datagen.hpp"
#include "aisgd/loss.hpp"
#include "aisgd/schedule.hpp"
#include "aisgd/solver.hpp"
#include "aisgd/stream.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aisgd {

/// A learning-rate family entry of a config before it is resolved against
/// the data: the leading constant may be given in units of 1/R^2, and the
/// Xu eta0 may be left to automatic tuning.
struct ScheduleSpec {
  LearningRate::Kind kind = LearningRate::Kind::constant;
  double value = 0.0;
  double exponent = 2.0 / 3.0;
  bool per_r2 = false;
  bool tune_eta0 = false;

  std::string label() const;
};

struct ExperimentConfig {
  SyntheticTask task = SyntheticTask::linear;
  std::optional<std::filesystem::path> data_path;
  std::optional<std::filesystem::path> test_path;
  double test_fraction = 0.2;

  std::size_t n = 0;
  std::size_t p = 0;
  double noise_sd = 1.0;
  double theta_star_norm = 0.0;
  double theta0_norm = 0.0;

  std::vector<Algorithm> algorithms;
  GlmLoss loss;
  std::vector<ScheduleSpec> schedules;

  int passes = 1;
  /// 0 picks max(1, N / 100).
  std::uint64_t eval_every = 0;
  EvalSpacing eval_spacing = EvalSpacing::linear;
  int eval_per_decade = 20;
  bool shuffle = false;

  RngSeed seed;
  std::optional<std::filesystem::path> out;

  /// Validates and converts a key-value config. Required keys: task,
  /// algorithms, loss, schedule.kind (+ its parameters), n, p or data.path,
  /// seed, out.
  static ExperimentConfig from(const KeyValueConfig& kv);
  void validate() const;
};

/// Every key ExperimentConfig::from understands, for flag mirroring.
const std::vector<std::string>& known_config_keys();

/// Data and evaluation target resolved from a config.
struct Problem {
  Dataset train;
  std::optional<Dataset> test;
  std::optional<SyntheticSpec> spec;
  /// trace(H) for synthetic data, mean |x|^2 of the training set otherwise.
  double r2 = 1.0;
  Vector theta0;

  Evaluator evaluator() const;
  std::string metric_name() const;
};

Problem load_problem(const ExperimentConfig& config);

struct RunResult {
  std::string run_id;
  Algorithm algorithm = Algorithm::sgd;
  LearningRate schedule = LearningRate::constant(1.0);
  std::vector<TracePoint> trace;
  double initial_metric = 0.0;
  double final_metric = 0.0;
  bool diverged = false;
  OptimizerState state;
};

struct BenchmarkResult {
  std::vector<RunResult> runs;
  std::string metric_name;

  const RunResult& find(std::string_view run_id) const;
};

/// One run per (algorithm, schedule). Writes <out>/<run_id>.csv when the
/// config has an output directory (created if missing).
BenchmarkResult run_benchmark(const ExperimentConfig& config);
BenchmarkResult run_benchmark(const ExperimentConfig& config, const Problem& problem);

/// Fraction of samples with sign(x^T theta) != y, sign(0) = +1.
double classification_error(const Vector& theta, const Dataset& test);

/// Mean of (y - x^T theta)^2.
double mean_squared_error(const Vector& theta, const Dataset& test);

/// Xu eta0 picked from {2^-6, ..., 2^4} / r2 by mean training loss on a
/// seeded subset of min(1000, max(1, N / 10)) samples after one pass of
/// `algorithm` over it. Ties go to the smaller eta0.
double tune_eta0(Algorithm algorithm, const GlmLoss& loss, const Dataset& train, double r2,
                 RngSeed seed);

/// CSV with header run_id,n,metric,diverged,wall_ms; reals with 17
/// significant digits.
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);
void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace);

/// OLS slope of log(metric) on log(n) over the trailing `window_fraction`
/// of points. Needs at least 10 finite points there, all positive.
double fit_loglog_slope(std::span<const TracePoint> trace, double window_fraction = 0.5);

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> columns;
  /// metric[value][column]
  std::vector<std::vector<double>> final_metric;
  std::vector<std::vector<bool>> diverged;

  std::size_t column(std::string_view name) const;
};

/// Accepted axes: lambda, gamma_constant, gamma1, eta0.
const std::vector<std::string>& sweep_axes();

/// Runs the benchmark once per value of `axis`, recording each run's final
/// metric. Writes <out>/sweep_<axis>.csv (value x column) plus per-value
/// traces under <out>/<axis>_<value>/.
SweepResult sensitivity_sweep(const ExperimentConfig& base, std::string_view axis,
                              std::span<const double> values);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

/// %.17g
std::string format_real(double v);

}  // namespace aisgd
