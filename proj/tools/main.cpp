#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tunnelsplit/commands.hpp"
#include "tunnelsplit/config.hpp"
#include "tunnelsplit/errors.hpp"
#include "tunnelsplit/parallel.hpp"

namespace ts = tunnelsplit;

int main(int argc, char** argv) {
  CLI::App app{"tunnelsplit: transmission/reflection splitting of 1D wave-packet scattering"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir = ".";
  unsigned threads = 0;
  app.add_option("--config", config_path, "Scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "Named scenario: paper-barrier, paper-well, delta, free");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (default TUNNELSPLIT_THREADS or all cores)");

  auto* params = app.add_subcommand("params", "Tabulate T, R, J, F and derivatives over the k grid");
  auto* evolve = app.add_subcommand("evolve", "Write full/tr/ref fields at the configured times");
  auto* times = app.add_subcommand("times", "Exact, asymptotic and phase times");
  auto* check = app.add_subcommand("check", "Run the invariant suite on the scenario");
  ts::CheckOptions check_opt;
  check->add_flag("--corrupt-f-branch", check_opt.corrupt_f_branch,
                  "Test hook: shift F by pi so the parity check must fail");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() == preset_name.empty())
      throw ts::InvalidInput("give exactly one of --config and --preset");
    if (threads > 0) ts::set_thread_count(threads);
    const auto cfg = config_path.empty() ? ts::preset(preset_name) : ts::load_config(config_path);
    if (params->parsed()) return ts::cmd_params(cfg, out_dir, std::cout);
    if (evolve->parsed()) return ts::cmd_evolve(cfg, out_dir, std::cout);
    if (times->parsed()) return ts::cmd_times(cfg, out_dir, std::cout);
    if (check->parsed()) return ts::cmd_check(cfg, check_opt, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
