#pragma once

#include <filesystem>
#include <ostream>

#include "tunnelsplit/checks.hpp"
#include "tunnelsplit/config.hpp"

namespace tunnelsplit {

// Each command writes its files under `out` and a short summary to `log`,
// and returns the process exit code.

// <hash>_params.csv: k, T, R, J, F, J', F', Lambda, Lambda' on the default KGrid.
int cmd_params(const ScenarioConfig& c, const std::filesystem::path& out, std::ostream& log);

// <hash>_t<time>_<channel>.csv (x, re, im, abs2) per time and channel,
// <hash>_t<time>_interference.csv and <hash>_evolve_summary.csv.
int cmd_evolve(const ScenarioConfig& c, const std::filesystem::path& out, std::ostream& log);

// Timing report as text on `log` and as <hash>_times.csv.
int cmd_times(const ScenarioConfig& c, const std::filesystem::path& out, std::ostream& log);

// Invariant suite; non-zero exit if any check fails.
int cmd_check(const ScenarioConfig& c, const CheckOptions& opt, std::ostream& log);

}  // namespace tunnelsplit
