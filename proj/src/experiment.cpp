#include "aisgd/experiment.hpp"

#include "aisgd/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace aisgd {

namespace {

constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kTheta0Stream = 3;
constexpr std::uint64_t kThetaStarStream = 4;
constexpr std::uint64_t kSplitStream = 5;
constexpr std::uint64_t kTuneStream = 6;

std::string short_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : format_real(v);
}

Vector random_direction(std::size_t p, double norm, RngSeed seed, std::uint64_t stream) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(p));
  if (norm == 0.0 || p == 0) return v;
  Rng rng = make_rng(seed, stream);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v * (norm / v.norm());
}

bool parse_bool(std::string_view s, std::string_view key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("invalid boolean '" + std::string(s) + "' for " + std::string(key));
}

std::vector<double> parse_reals(std::string_view text, std::string_view key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item, key));
  if (out.empty()) throw ValidationError("config key '" + std::string(key) + "' has no values");
  return out;
}

// Re-dimensions sparse samples so train and test share p.
void set_dimension(Dataset& data, std::size_t p) {
  data.p = p;
  for (auto& s : data.samples) {
    if (!s.x.is_sparse()) continue;
    SparseVector v = s.x.sparse();
    v.dim = p;
    s.x = FeatureVector(std::move(v));
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string ScheduleSpec::label() const {
  std::string out;
  switch (kind) {
    case LearningRate::Kind::constant:
      out = "const_" + short_real(value);
      break;
    case LearningRate::Kind::polynomial:
      out = "poly_" + short_real(value) + "_" + short_real(exponent);
      break;
    case LearningRate::Kind::xu:
      out = tune_eta0 ? std::string("xu_auto") : "xu_" + short_real(value);
      break;
  }
  if (per_r2 && !tune_eta0) out += "_invR2";
  return out;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "task",           "data.path",        "test.path",       "test_fraction",
      "n",              "p",                "noise_sd",        "theta_star.norm",
      "theta0.norm",    "algorithms",       "loss",            "lambda",
      "schedule.kind",  "schedule.gamma",   "schedule.gamma1", "schedule.exponent",
      "schedule.eta0",  "schedule.scale",   "passes",          "eval_every",
      "eval_spacing",   "eval_per_decade",  "shuffle",         "seed",
      "out"};
  return keys;
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.entries()) {
    const auto& known = known_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }

  ExperimentConfig c;
  const auto task = kv.require("task");
  if (task == "linear") {
    c.task = SyntheticTask::linear;
  } else if (task == "logistic") {
    c.task = SyntheticTask::logistic;
  } else {
    throw ValidationError("task must be 'linear' or 'logistic', got '" + task + "'");
  }

  if (auto v = kv.get("data.path")) c.data_path = *v;
  if (auto v = kv.get("test.path")) c.test_path = *v;
  if (auto v = kv.get("test_fraction")) c.test_fraction = parse_double(*v, "test_fraction");

  if (c.data_path) {
    if (auto v = kv.get("n")) c.n = static_cast<std::size_t>(parse_integer(*v, "n"));
    if (auto v = kv.get("p")) c.p = static_cast<std::size_t>(parse_integer(*v, "p"));
  } else {
    const auto n = parse_integer(kv.require("n"), "n");
    const auto p = parse_integer(kv.require("p"), "p");
    if (n < 1) throw ValidationError("n must be at least 1");
    if (p < 1) throw ValidationError("p must be at least 1");
    c.n = static_cast<std::size_t>(n);
    c.p = static_cast<std::size_t>(p);
  }
  if (auto v = kv.get("noise_sd")) c.noise_sd = parse_double(*v, "noise_sd");
  if (auto v = kv.get("theta_star.norm")) c.theta_star_norm = parse_double(*v, "theta_star.norm");
  if (auto v = kv.get("theta0.norm")) c.theta0_norm = parse_double(*v, "theta0.norm");

  for (const auto& name : split_list(kv.require("algorithms"))) {
    c.algorithms.push_back(parse_algorithm(name));
  }
  double lambda = 0.0;
  if (auto v = kv.get("lambda")) lambda = parse_double(*v, "lambda");
  c.loss = GlmLoss::parse(kv.require("loss"), lambda);

  const auto kind = kv.require("schedule.kind");
  bool per_r2 = false;
  if (auto v = kv.get("schedule.scale")) {
    if (*v == "inv_r2") {
      per_r2 = true;
    } else if (*v != "none") {
      throw ValidationError("schedule.scale must be 'none' or 'inv_r2'");
    }
  }
  double exponent = 2.0 / 3.0;
  if (auto v = kv.get("schedule.exponent")) exponent = parse_double(*v, "schedule.exponent");
  if (kind == "const") {
    for (double g : parse_reals(kv.require("schedule.gamma"), "schedule.gamma")) {
      c.schedules.push_back({LearningRate::Kind::constant, g, 0.0, per_r2, false});
    }
  } else if (kind == "poly") {
    for (double g : parse_reals(kv.require("schedule.gamma1"), "schedule.gamma1")) {
      c.schedules.push_back({LearningRate::Kind::polynomial, g, exponent, per_r2, false});
    }
  } else if (kind == "xu") {
    const auto eta0 = kv.require("schedule.eta0");
    if (eta0 == "auto") {
      c.schedules.push_back({LearningRate::Kind::xu, 0.0, 0.75, false, true});
    } else {
      for (double e : parse_reals(eta0, "schedule.eta0")) {
        c.schedules.push_back({LearningRate::Kind::xu, e, 0.75, per_r2, false});
      }
    }
  } else {
    throw ValidationError("schedule.kind must be const, poly or xu, got '" + kind + "'");
  }

  if (auto v = kv.get("passes")) c.passes = static_cast<int>(parse_integer(*v, "passes"));
  if (auto v = kv.get("eval_every")) {
    const auto e = parse_integer(*v, "eval_every");
    if (e < 1) throw ValidationError("eval_every must be at least 1");
    c.eval_every = static_cast<std::uint64_t>(e);
  } else {
    c.eval_every = 0;
  }
  if (auto v = kv.get("eval_spacing")) {
    if (*v == "linear") {
      c.eval_spacing = EvalSpacing::linear;
    } else if (*v == "log") {
      c.eval_spacing = EvalSpacing::log;
    } else {
      throw ValidationError("eval_spacing must be 'linear' or 'log'");
    }
  }
  if (auto v = kv.get("eval_per_decade")) {
    c.eval_per_decade = static_cast<int>(parse_integer(*v, "eval_per_decade"));
  }
  if (auto v = kv.get("shuffle")) c.shuffle = parse_bool(*v, "shuffle");

  const auto seed = parse_integer(kv.require("seed"), "seed");
  if (seed < 0) throw ValidationError("seed must be non-negative");
  c.seed = RngSeed{static_cast<std::uint64_t>(seed)};
  const auto out = kv.require("out");
  if (!out.empty()) c.out = out;

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ValidationError("at least one algorithm is required");
  if (schedules.empty()) throw ValidationError("at least one learning-rate schedule is required");
  if (!data_path) {
    if (n < 1) throw ValidationError("n must be at least 1");
    if (p < 1) throw ValidationError("p must be at least 1");
    if (eval_every > n) throw ValidationError("eval_every exceeds the dataset size");
    if (!(noise_sd > 0.0)) throw ValidationError("noise_sd must be positive");
  }
  if (passes < 1) throw ValidationError("passes must be at least 1");
  if (eval_per_decade < 1) throw ValidationError("eval_per_decade must be at least 1");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in [0, 1)");
  }
  if (theta0_norm < 0.0 || theta_star_norm < 0.0) {
    throw ValidationError("theta norms must be non-negative");
  }
  for (const auto& s : schedules) {
    if (s.tune_eta0) continue;
    // Throws for out-of-range constants and exponents.
    if (s.kind == LearningRate::Kind::constant) LearningRate::constant(s.value);
    if (s.kind == LearningRate::Kind::polynomial) LearningRate::polynomial(s.value, s.exponent);
    if (s.kind == LearningRate::Kind::xu) LearningRate::xu(s.value);
  }
  if (task == SyntheticTask::logistic && loss.family == LossFamily::poisson) {
    throw ValidationError("poisson loss does not apply to a +-1 classification task");
  }
}

Problem load_problem(const ExperimentConfig& config) {
  config.validate();
  Problem problem;
  if (config.data_path) {
    const auto mode = config.task == SyntheticTask::logistic ? LabelMode::binary : LabelMode::raw;
    problem.train = read_libsvm(*config.data_path, mode);
    if (config.test_path) {
      problem.test = read_libsvm(*config.test_path, mode);
    } else if (config.test_fraction > 0.0) {
      auto [train, test] =
          split(problem.train, config.test_fraction, RngSeed{config.seed.value ^ kSplitStream});
      problem.train = std::move(train);
      problem.test = std::move(test);
    }
    std::size_t p = std::max(problem.train.p, config.p);
    if (problem.test) p = std::max(p, problem.test->p);
    set_dimension(problem.train, p);
    if (problem.test) set_dimension(*problem.test, p);
    if (config.n > 0 && config.n < problem.train.size()) problem.train.samples.resize(config.n);
    if (!problem.test) {
      throw ValidationError("file data needs test.path or a positive test_fraction");
    }
    problem.r2 = mean_squared_norm(problem.train.samples);
  } else {
    SyntheticSpec spec;
    spec.n = config.n;
    spec.p = config.p;
    spec.covariance = random_covariance(harmonic_spectrum(config.p), config.seed);
    spec.theta_star = random_direction(config.p, config.theta_star_norm, config.seed, kThetaStarStream);
    spec.noise_sd = config.noise_sd;
    spec.seed = config.seed;
    spec.task = config.task;
    problem.train = make_normal_design(spec);
    if (config.task == SyntheticTask::logistic) {
      SyntheticSpec test_spec = spec;
      test_spec.n = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(
                 (config.test_fraction > 0.0 ? config.test_fraction : 0.2) * config.n)));
      problem.test = make_normal_design(test_spec, kTestStream);
    }
    problem.r2 = trace_radius(spec);
    problem.spec = std::move(spec);
  }
  if (config.shuffle) problem.train = shuffled(problem.train, config.seed);
  if (config.eval_every > problem.train.size()) {
    throw ValidationError("eval_every exceeds the dataset size");
  }
  problem.theta0 = random_direction(problem.train.p, config.theta0_norm, config.seed, kTheta0Stream);
  return problem;
}

Evaluator Problem::evaluator() const {
  if (spec && spec->task == SyntheticTask::linear) {
    return [this](const Vector& theta) { return excess_risk(theta, *spec); };
  }
  const bool classify = spec ? spec->task == SyntheticTask::logistic
                             : std::all_of(train.samples.begin(), train.samples.end(),
                                           [](const Sample& s) { return s.y == 1.0 || s.y == -1.0; });
  if (classify) {
    return [this](const Vector& theta) { return classification_error(theta, *test); };
  }
  return [this](const Vector& theta) { return mean_squared_error(theta, *test); };
}

std::string Problem::metric_name() const {
  if (spec && spec->task == SyntheticTask::linear) return "excess_risk";
  if (spec) return "test_error";
  const bool classify = std::all_of(train.samples.begin(), train.samples.end(),
                                    [](const Sample& s) { return s.y == 1.0 || s.y == -1.0; });
  return classify ? "test_error" : "test_mse";
}

const RunResult& BenchmarkResult::find(std::string_view run_id) const {
  for (const auto& r : runs) {
    if (r.run_id == run_id) return r;
  }
  throw ValidationError("no run named '" + std::string(run_id) + "'");
}

BenchmarkResult run_benchmark(const ExperimentConfig& config) {
  return run_benchmark(config, load_problem(config));
}

BenchmarkResult run_benchmark(const ExperimentConfig& config, const Problem& problem) {
  config.validate();
  BenchmarkResult result;
  result.metric_name = problem.metric_name();
  const auto evaluate = problem.evaluator();

  StreamOptions options;
  options.eval_every = config.eval_every > 0
                           ? config.eval_every
                           : std::max<std::uint64_t>(1, problem.train.size() / 100);
  options.spacing = config.eval_spacing;
  options.per_decade = config.eval_per_decade;
  options.passes = config.passes;

  if (config.out) {
    std::error_code ec;
    std::filesystem::create_directories(*config.out, ec);
    if (ec) throw IoError("cannot create output directory " + config.out->string() + ": " + ec.message());
  }

  for (const auto& sched : config.schedules) {
    for (Algorithm algorithm : config.algorithms) {
      RunResult run;
      run.algorithm = algorithm;
      if (sched.tune_eta0) {
        run.schedule = LearningRate::xu(
            tune_eta0(algorithm, config.loss, problem.train, problem.r2, config.seed));
      } else {
        const double value = sched.per_r2 ? sched.value / problem.r2 : sched.value;
        switch (sched.kind) {
          case LearningRate::Kind::constant:
            run.schedule = LearningRate::constant(value);
            break;
          case LearningRate::Kind::polynomial:
            run.schedule = LearningRate::polynomial(value, sched.exponent);
            break;
          case LearningRate::Kind::xu:
            run.schedule = LearningRate::xu(value);
            break;
        }
      }
      run.run_id = algorithm_name(algorithm) + "_" + sched.label();
      options.run_id = run.run_id;
      run.initial_metric = evaluate(problem.theta0);
      auto stream = run_stream(algorithm, config.loss, run.schedule, problem.train.samples,
                               problem.theta0, evaluate, options);
      run.trace = std::move(stream.trace);
      run.diverged = stream.diverged;
      run.state = std::move(stream.state);
      run.final_metric = run.trace.back().metric;
      if (config.out) write_trace_csv(*config.out / (run.run_id + ".csv"), run.trace);
      result.runs.push_back(std::move(run));
    }
  }
  return result;
}

double classification_error(const Vector& theta, const Dataset& test) {
  if (test.samples.empty()) throw ValidationError("classification_error on an empty test set");
  std::size_t wrong = 0;
  for (const auto& s : test.samples) {
    const double predicted = s.x.dot(theta) >= 0.0 ? 1.0 : -1.0;
    if (predicted != s.y) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(test.samples.size());
}

double mean_squared_error(const Vector& theta, const Dataset& test) {
  if (test.samples.empty()) throw ValidationError("mean_squared_error on an empty test set");
  double acc = 0.0;
  for (const auto& s : test.samples) {
    const double r = s.y - s.x.dot(theta);
    acc += r * r;
  }
  return acc / static_cast<double>(test.samples.size());
}

double tune_eta0(Algorithm algorithm, const GlmLoss& loss, const Dataset& train, double r2,
                 RngSeed seed) {
  if (train.samples.empty()) throw ValidationError("cannot tune eta0 on an empty dataset");
  const std::size_t m = std::min<std::size_t>(1000, std::max<std::size_t>(1, train.size() / 10));
  Dataset subset = shuffled(train, RngSeed{seed.value ^ kTuneStream});
  subset.samples.resize(m);

  auto training_loss = [&](const Vector& theta) {
    if (is_diverged(theta)) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (const auto& s : subset.samples) acc += loss.value(s.x.dot(theta), s.y);
    return acc / static_cast<double>(m) + 0.5 * loss.lambda * theta.squaredNorm();
  };

  StreamOptions options;
  options.eval_every = m;
  const Vector theta0 = Vector::Zero(static_cast<Eigen::Index>(train.p));
  double best_eta = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int k = -6; k <= 4; ++k) {
    const double eta0 = std::ldexp(1.0, k) / r2;
    auto run = run_stream(algorithm, loss, LearningRate::xu(eta0), subset.samples, theta0,
                          training_loss, options);
    const double value = run.diverged ? std::numeric_limits<double>::infinity()
                                      : run.trace.back().metric;
    if (best_eta == 0.0 || value < best_loss) {
      best_eta = eta0;
      best_loss = value;
    }
  }
  return best_eta;
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "run_id,n,metric,diverged,wall_ms\n";
  for (const auto& row : trace) {
    out << row.run_id << ',' << row.n << ',' << format_real(row.metric) << ','
        << (row.diverged ? 1 : 0) << ',' << format_real(row.wall_ms) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_trace_csv(out, trace);
  if (!out) throw IoError("write failed for " + path.string());
}

double fit_loglog_slope(std::span<const TracePoint> trace, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
    throw ValidationError("window_fraction must lie in (0, 1)");
  }
  const auto window = static_cast<std::size_t>(
      std::ceil(window_fraction * static_cast<double>(trace.size())));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& row : trace.subspan(trace.size() - window)) {
    if (!std::isfinite(row.metric)) continue;
    if (row.metric <= 0.0) {
      throw ValidationError("log-log slope needs positive metrics; got " + format_real(row.metric) +
                            " at n = " + std::to_string(row.n));
    }
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.metric);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 10) {
    throw ValidationError("log-log slope needs at least 10 finite points in the window, got " +
                          std::to_string(count));
  }
  const double k = static_cast<double>(count);
  const double denom = k * sxx - sx * sx;
  if (denom <= 0.0) throw ValidationError("log-log slope window has no spread in n");
  return (k * sxy - sx * sy) / denom;
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"lambda", "gamma_constant", "gamma1", "eta0"};
  return axes;
}

std::size_t SweepResult::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ValidationError("no sweep column named '" + std::string(name) + "'");
}

SweepResult sensitivity_sweep(const ExperimentConfig& base, std::string_view axis,
                              std::span<const double> values) {
  const auto& axes = sweep_axes();
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw ValidationError("unknown sweep axis '" + std::string(axis) +
                          "' (expected lambda, gamma_constant, gamma1 or eta0)");
  }
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  base.validate();

  const bool per_r2 = base.schedules.front().per_r2;
  double exponent = 2.0 / 3.0;
  for (const auto& s : base.schedules) {
    if (s.kind == LearningRate::Kind::polynomial) exponent = s.exponent;
  }

  const Problem problem = load_problem(base);
  SweepResult sweep;
  sweep.axis = std::string(axis);
  sweep.values.assign(values.begin(), values.end());

  for (double v : values) {
    ExperimentConfig cfg = base;
    if (axis == "lambda") {
      cfg.loss = cfg.loss.with_lambda(v);
    } else if (axis == "gamma_constant") {
      cfg.schedules = {{LearningRate::Kind::constant, v, 0.0, per_r2, false}};
    } else if (axis == "gamma1") {
      cfg.schedules = {{LearningRate::Kind::polynomial, v, exponent, per_r2, false}};
    } else {
      cfg.schedules = {{LearningRate::Kind::xu, v, 0.75, per_r2, false}};
    }
    if (base.out) cfg.out = *base.out / (sweep.axis + "_" + short_real(v));

    const auto bench = run_benchmark(cfg, problem);
    const bool by_algorithm = cfg.schedules.size() == 1;
    if (sweep.columns.empty()) {
      for (const auto& run : bench.runs) {
        sweep.columns.push_back(by_algorithm ? algorithm_name(run.algorithm) : run.run_id);
      }
    }
    std::vector<double> metrics;
    std::vector<bool> diverged;
    for (const auto& run : bench.runs) {
      metrics.push_back(run.final_metric);
      diverged.push_back(run.diverged);
    }
    sweep.final_metric.push_back(std::move(metrics));
    sweep.diverged.push_back(std::move(diverged));
  }

  if (base.out) {
    const auto path = *base.out / ("sweep_" + sweep.axis + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_sweep_csv(out, sweep);
  }
  return sweep;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << sweep.axis;
  for (const auto& c : sweep.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    out << format_real(sweep.values[i]);
    for (double m : sweep.final_metric[i]) out << ',' << format_real(m);
    out << '\n';
  }
}

}  // namespace aisgd
