#pragma once

#include <string>
#include <vector>

#include "tunnelsplit/config.hpp"

namespace tunnelsplit {

struct CheckOptions {
  // Test hook: shifts F by pi before building the RWF so parity must fail.
  bool corrupt_f_branch = false;
  // Number of k samples for the stationary checks.
  std::size_t k_samples = 16;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  // Non-gating checks report a measurement without affecting the exit code.
  bool gating = true;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_checks(const ScenarioConfig& config, const CheckOptions& opt = {});

}  // namespace tunnelsplit
