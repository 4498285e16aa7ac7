// Batch runner for the drilling simulation.
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "drillsim/experiment.hpp"

using namespace drillsim;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

void print_summary(const std::vector<BatchResult>& results) {
  std::cout << std::left << std::setw(10) << "arm" << std::right << std::setw(9) << "success" << std::setw(8)
            << "under" << std::setw(8) << "over_m" << std::setw(8) << "over_h" << std::setw(12) << "time_min"
            << '\n';
  std::cout << std::fixed << std::setprecision(1);
  for (const auto& r : results) {
    const auto& s = r.summary;
    std::cout << std::left << std::setw(10) << arm_name(s.arm) << std::right << std::setw(9) << s.success_pct
              << std::setw(8) << s.under_drill_pct << std::setw(8) << s.over_drill_model_pct << std::setw(8)
              << s.over_drill_intervened_pct << std::setw(12);
    if (s.mean_time_success_min) {
      std::cout << std::setprecision(2) << *s.mean_time_success_min << std::setprecision(1);
    } else {
      std::cout << "-";
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop membrane drilling simulator"};

  std::string config_path;
  std::optional<std::string> arm, profile, out;
  std::optional<std::size_t> trials, threads;
  std::optional<std::uint64_t> seed;
  bool ablation = false, dump = false, perfect = false, traces = false, quiet = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--arm", arm, "baseline|force|plane|full");
  app.add_option("--profile", profile, "egg|mouse");
  app.add_option("--trials", trials, "trials per arm");
  app.add_option("--seed", seed, "base seed; trial i uses seed+i");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_flag("--ablation", ablation, "run all four arms");
  app.add_flag("--dump-surface", dump, "write surface.csv for trial 0");
  app.add_flag("--perfect-sensors", perfect, "noise-free sensors");
  app.add_flag("--traces", traces, "write per-trial trace CSVs");
  app.add_flag("-q,--quiet", quiet, "no summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (profile) {
      const auto p = parse_profile(*profile);
      if (!p) throw ConfigError("unknown profile '" + *profile + "'");
      apply_profile(config, *p);
    }
    if (arm) {
      const auto a = parse_arm(*arm);
      if (!a) throw ConfigError("unknown arm '" + *arm + "'");
      config.arm = *a;
    }
    if (trials) config.trials = *trials;
    if (seed) config.base_seed = *seed;
    if (out) config.output_dir = *out;
    if (threads) config.threads = *threads;
    config.ablation = config.ablation || ablation;
    config.dump_surface = config.dump_surface || dump;
    config.perfect_sensors = config.perfect_sensors || perfect;
    config.write_traces = config.write_traces || traces;
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (config.dump_surface) dump_surface(config);
    std::vector<BatchResult> results;
    if (config.ablation) {
      results = ablation_suite(config);
    } else {
      results.push_back(run_batch(config, config.arm));
    }
    write_outputs(config, results);
    if (!quiet) print_summary(results);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
