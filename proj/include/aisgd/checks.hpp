#pragma once

#include "aisgd/core.hpp"
#include "aisgd/solver.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace aisgd {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  FixedPointOptions fixed_point;
  RngSeed seed{20240601};
};

/// fixed_point, proximal, averaging, contraction, step_bound, decay_factor
const std::vector<std::string>& check_names();

/// Runs the numeric checks whose name contains `filter` (all when empty).
/// Throws ValidationError when nothing matches.
std::vector<CheckResult> run_checks(const CheckOptions& options, std::string_view filter = {});

}  // namespace aisgd
