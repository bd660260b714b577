// Command-line front end: fit, bench, sweep, check.
//
// Exit codes: 0 ok, 1 invalid input, 2 I/O failure, 3 every fitted run
// diverged, 4 a theory check failed.

#include "aisgd/checks.hpp"
#include "aisgd/config.hpp"
#include "aisgd/experiment.hpp"
#include "aisgd/solver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace aisgd;

enum ExitCode { kOk = 0, kInvalid = 1, kIo = 2, kDiverged = 3, kCheckFailed = 4 };

// One optional flag per config key; a given flag overrides the file value.
struct KeyOverrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App& cmd) {
    for (const auto& key : known_config_keys()) {
      cmd.add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { values[key] = v; },
          "Override config key '" + key + "'");
    }
  }

  KeyValueConfig apply(const std::optional<std::string>& path) const {
    KeyValueConfig kv = path ? KeyValueConfig::load(*path) : KeyValueConfig{};
    for (const auto& [k, v] : values) kv.set(k, v);
    return kv;
  }
};

int write_estimate(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write estimate file " + path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v[i]) << '\n';
  if (!out) throw IoError("write failed for " + path);
  return kOk;
}

struct FitArgs {
  std::vector<std::string> synthetic;
  std::optional<std::string> data;
  std::optional<std::string> test;
  std::string task = "linear";
  std::string algo;
  std::string loss;
  std::string rate;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int passes = 1;
  std::string out = "estimate.txt";
};

int cmd_fit(const FitArgs& a, int verbosity) {
  KeyValueConfig kv;
  kv.set("task", a.task);
  kv.set("algorithms", a.algo);
  kv.set("loss", a.loss);
  kv.set("lambda", format_real(a.lambda));
  kv.set("seed", std::to_string(a.seed));
  kv.set("passes", std::to_string(a.passes));
  kv.set("out", "");

  const auto rate = LearningRate::parse(a.rate);
  switch (rate.kind()) {
    case LearningRate::Kind::constant:
      kv.set("schedule.kind", "const");
      kv.set("schedule.gamma", format_real(rate.scale()));
      break;
    case LearningRate::Kind::polynomial:
      kv.set("schedule.kind", "poly");
      kv.set("schedule.gamma1", format_real(rate.scale()));
      kv.set("schedule.exponent", format_real(rate.exponent()));
      break;
    case LearningRate::Kind::xu:
      kv.set("schedule.kind", "xu");
      kv.set("schedule.eta0", format_real(rate.scale()));
      break;
  }

  if (a.data) {
    if (!a.synthetic.empty()) throw ValidationError("--data and --synthetic are exclusive");
    kv.set("data.path", *a.data);
    if (a.test) kv.set("test.path", *a.test);
  } else {
    if (a.synthetic.empty()) throw ValidationError("fit needs --data or --synthetic");
    for (const auto& item : a.synthetic) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("--synthetic expects key=value items, got '" + item + "'");
      }
      const auto key = item.substr(0, eq);
      if (key != "n" && key != "p" && key != "noise_sd" && key != "theta_star.norm" &&
          key != "theta0.norm" && key != "test_fraction") {
        throw ValidationError("unknown --synthetic key '" + key + "'");
      }
      kv.set(key, item.substr(eq + 1));
    }
  }
  if (!kv.has("eval_every") && kv.has("n")) kv.set("eval_every", kv.require("n"));

  auto config = ExperimentConfig::from(kv);
  const auto problem = load_problem(config);
  config.eval_every = problem.train.size();
  const auto bench = run_benchmark(config, problem);
  const auto& run = bench.runs.front();

  write_estimate(a.out, run.state.estimate());
  if (is_averaged(run.algorithm)) write_estimate(a.out + ".theta", run.state.theta);

  std::cout << "fit " << run.run_id << " samples=" << run.trace.back().n << ' '
            << bench.metric_name << '=' << format_real(run.final_metric)
            << (run.diverged ? " diverged" : "") << " estimate=" << a.out << '\n';
  if (verbosity > 0) {
    std::cout << "initial " << bench.metric_name << '=' << format_real(run.initial_metric) << '\n';
  }
  return run.diverged ? kDiverged : kOk;
}

int cmd_bench(const std::optional<std::string>& config_path, const KeyOverrides& overrides,
              int verbosity) {
  const auto config = ExperimentConfig::from(overrides.apply(config_path));
  const auto result = run_benchmark(config);
  for (const auto& run : result.runs) {
    std::cout << run.run_id << ' ' << result.metric_name << '=' << format_real(run.final_metric)
              << (run.diverged ? " diverged" : "") << '\n';
    if (verbosity > 0) {
      std::cout << "  rate " << run.schedule.label() << ", initial "
                << format_real(run.initial_metric) << ", " << run.trace.size() << " rows\n";
    }
  }
  if (config.out) std::cout << "traces written to " << config.out->string() << '\n';
  return kOk;
}

int cmd_sweep(const std::optional<std::string>& config_path, const KeyOverrides& overrides,
              const std::string& axis, const std::string& values) {
  const auto config = ExperimentConfig::from(overrides.apply(config_path));
  std::vector<double> grid;
  for (const auto& v : split_list(values)) grid.push_back(parse_double(v, "--values"));
  const auto sweep = sensitivity_sweep(config, axis, grid);
  write_sweep_csv(std::cout, sweep);
  return kOk;
}

int cmd_check(const std::string& filter, bool inject_fault, std::uint64_t seed) {
  CheckOptions options;
  options.seed = RngSeed{seed};
  if (inject_fault) options.fixed_point.tolerance = 1.0;
  const auto results = run_checks(options, filter);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged implicit SGD and comparators for GLM losses"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "More output (repeatable)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one model on a dataset and write the estimate");
  fit_cmd->add_option("--synthetic", fit.synthetic, "Synthetic design, e.g. p=20 n=10000")
      ->expected(1, -1);
  fit_cmd->add_option("--data", fit.data, "Training data in libsvm format");
  fit_cmd->add_option("--test", fit.test, "Test data in libsvm format");
  fit_cmd->add_option("--task", fit.task, "linear | logistic");
  fit_cmd->add_option("--algo", fit.algo, "sgd | isgd | asgd | aisgd | adagrad")->required();
  fit_cmd->add_option("--loss", fit.loss, "squared | logistic | poisson | hinge:<delta>")
      ->required();
  fit_cmd->add_option("--rate", fit.rate, "const:<g> | poly:<g1>:<exp> | xu:<eta0>")->required();
  fit_cmd->add_option("--lambda", fit.lambda, "L2 regularization");
  fit_cmd->add_option("--passes", fit.passes, "Passes over the data");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--out", fit.out, "Estimate file (one number per line)");

  std::optional<std::string> bench_config;
  KeyOverrides bench_overrides;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark config and write CSV traces");
  bench_cmd->add_option("config", bench_config, "Config file (key = value lines)");
  bench_overrides.attach(*bench_cmd);

  std::optional<std::string> sweep_config;
  KeyOverrides sweep_overrides;
  std::string axis;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sensitivity sweep over one hyperparameter");
  sweep_cmd->add_option("config", sweep_config, "Config file (key = value lines)");
  sweep_cmd->add_option("--axis", axis, "lambda | gamma_constant | gamma1 | eta0")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_overrides.attach(*sweep_cmd);

  std::string filter;
  bool inject_fault = false;
  std::uint64_t check_seed = 20240601;
  auto* check_cmd = app.add_subcommand("check", "Run the numeric theory-check suite");
  check_cmd->add_option("--filter", filter, "Only checks whose name contains this");
  check_cmd->add_option("--seed", check_seed, "Random seed for the checks");
  check_cmd->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, verbosity);
    if (*bench_cmd) return cmd_bench(bench_config, bench_overrides, verbosity);
    if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_overrides, axis, values);
    if (*check_cmd) return cmd_check(filter, inject_fault, check_seed);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
