#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drillsim/drill_control.hpp"

namespace drillsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Profile { Egg, Mouse };

std::string_view profile_name(Profile p);
std::optional<Profile> parse_profile(std::string_view name);

/// Everything a batch needs. Defaults reproduce the egg ablation setting,
/// so an empty JSON document is a valid configuration.
struct ExperimentConfig {
  Profile profile = Profile::Egg;
  Arm arm = Arm::Full;
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "drillsim_out";
  bool ablation = false;
  bool perfect_sensors = false;
  bool write_traces = false;
  bool dump_surface = false;
  std::size_t threads = 0;  // 0 = hardware concurrency

  /// Profile presets with any JSON overrides already applied.
  ControlConfig control;
  SurfaceConfig surface = SurfaceConfig::egg();
  ImageSensorConfig image = ImageSensorConfig::egg();
  ForceSensorConfig force = ForceSensorConfig::egg();

  void validate() const;
};

/// Reads a JSON config; unknown keys are rejected. Throws ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Switches the profile and resets the surface and sensor presets to it.
void apply_profile(ExperimentConfig& config, Profile profile);

TrialConfig trial_config(const ExperimentConfig& config, Arm arm);

struct TrialRecord {
  std::size_t trial = 0;
  Arm arm = Arm::Full;
  Classification classification = Classification::UnderDrill;
  double time_min = 0.0;
  std::uint64_t seed = 0;
  bool criterion_met = false;
  double criterion_time_min = 0.0;
  double tilt_deg = 0.0;
};

struct BatchSummary {
  Arm arm = Arm::Full;
  std::size_t trials = 0;
  double success_pct = 0.0;
  double under_drill_pct = 0.0;
  double over_drill_model_pct = 0.0;
  double over_drill_intervened_pct = 0.0;
  /// Mean over successful trials only; empty when nothing succeeded.
  std::optional<double> mean_time_success_min;
  /// Median time to the stop criterion over trials that met it.
  std::optional<double> median_time_to_criterion_min;
};

struct BatchResult {
  BatchSummary summary;
  std::vector<TrialRecord> records;
  std::vector<RunOutcome> outcomes;  // kept only when traces are requested
};

/// Seed of trial i: base_seed + i, shared by every arm.
inline std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t i) { return config.base_seed + i; }

BatchSummary summarize(Arm arm, const std::vector<TrialRecord>& records);

/// Runs config.trials trials of one arm; results ordered by trial index.
BatchResult run_batch(const ExperimentConfig& config, Arm arm);

/// All four arms over the same trial seeds.
std::vector<BatchResult> ablation_suite(const ExperimentConfig& config);

void write_trials_csv(std::ostream& out, const std::vector<BatchResult>& results);
std::string summary_json(const ExperimentConfig& config, const std::vector<BatchResult>& results);

/// Writes trials.csv, summary.json and optional traces under
/// config.output_dir; each file appears atomically. Throws IoError.
void write_outputs(const ExperimentConfig& config, const std::vector<BatchResult>& results);

/// Writes surface.csv for trial 0 of the configured profile.
void dump_surface(const ExperimentConfig& config);

}  // namespace drillsim
