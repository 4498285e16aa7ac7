#include "drillsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace drillsim {

using nlohmann::json;

std::string_view profile_name(Profile p) { return p == Profile::Egg ? "egg" : "mouse"; }

std::optional<Profile> parse_profile(std::string_view name) {
  if (name == "egg") return Profile::Egg;
  if (name == "mouse") return Profile::Mouse;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  try {
    trial_config(*this, arm).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_profile(ExperimentConfig& config, Profile profile) {
  config.profile = profile;
  const bool egg = profile == Profile::Egg;
  config.surface = egg ? SurfaceConfig::egg() : SurfaceConfig::mouse();
  config.image = egg ? ImageSensorConfig::egg() : ImageSensorConfig::mouse();
  config.force = egg ? ForceSensorConfig::egg() : ForceSensorConfig::mouse();
}

namespace {

// Reads members of one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& object, std::string name) : object_(object), name_(std::move(name)) {
    if (!object_.is_object()) throw ConfigError("'" + name_ + "' must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    known_.insert(key);
    const auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("invalid value for '" + name_ + "." + key + "'");
    }
  }

  bool has(const char* key) {
    known_.insert(key);
    return object_.contains(key);
  }

  const json& at(const char* key) const { return object_.at(key); }

  void reject_unknown() const {
    for (const auto& [key, value] : object_.items()) {
      if (!known_.count(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
    }
  }

 private:
  const json& object_;
  std::string name_;
  std::set<std::string> known_;
};

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  ExperimentConfig config;
  Section root(doc, "config");
  std::string profile = "egg";
  root.read("profile", profile);
  const auto parsed_profile = parse_profile(profile);
  if (!parsed_profile) throw ConfigError("unknown profile '" + profile + "'");
  apply_profile(config, *parsed_profile);

  std::string arm(arm_name(config.arm));
  root.read("arm", arm);
  const auto parsed_arm = parse_arm(arm);
  if (!parsed_arm) throw ConfigError("unknown arm '" + arm + "'");
  config.arm = *parsed_arm;

  long long trials = static_cast<long long>(config.trials);
  root.read("trials", trials);
  if (trials < 1) throw ConfigError("trials must be at least 1");
  config.trials = static_cast<std::size_t>(trials);
  root.read("seed", config.base_seed);
  std::string out_dir = config.output_dir.string();
  root.read("output_dir", out_dir);
  config.output_dir = out_dir;
  root.read("ablation", config.ablation);
  root.read("perfect_sensors", config.perfect_sensors);
  root.read("write_traces", config.write_traces);
  root.read("dump_surface", config.dump_surface);
  root.read("threads", config.threads);

  if (root.has("control")) {
    Section s(root.at("control"), "control");
    auto& c = config.control;
    s.read("descent_speed", c.descent_speed);
    s.read("diameter", c.diameter);
    s.read("update_rate", c.update_rate);
    s.read("turn_period", c.turn_period);
    s.read("criterion_fraction", c.criterion_fraction);
    s.read("criterion_level", c.criterion_level);
    s.read("points", c.points);
    s.read("timeout_min", c.timeout_min);
    s.read("initial_clearance", c.initial_clearance);
    s.read("start_angle", c.start_angle);
    s.read("footprint_halfwidth", c.drill.footprint_halfwidth);
    s.read("rupture_margin", c.drill.rupture_margin);
    s.read("removable_fraction", c.removable_fraction);
    s.read("offsets_untouched_only", c.offsets_untouched_only);
    s.read("fused_progress_max", c.fused_progress_max);
    s.read("plane_min_conditioning", c.plane_min_conditioning);
    s.read("finishing_min_turns", c.finishing_min_turns);
    s.read("finishing_turns", c.finishing_turns);
    s.reject_unknown();
  }
  if (root.has("surface")) {
    Section s(root.at("surface"), "surface");
    auto& c = config.surface;
    s.read("nominal_thickness", c.nominal_thickness);
    s.read("thickness_variation", c.thickness_variation);
    s.read("tilt_min_deg", c.tilt_min_deg);
    s.read("tilt_max_deg", c.tilt_max_deg);
    s.read("perturbation_amplitude", c.perturbation_amplitude);
    s.read("base_height", c.base_height);
    s.read("min_wavelength", c.min_wavelength);
    s.read("max_wavelength", c.max_wavelength);
    s.read("thickness_modes", c.thickness_modes);
    s.read("height_modes", c.height_modes);
    s.reject_unknown();
  }
  if (root.has("image")) {
    Section s(root.at("image"), "image");
    auto& c = config.image;
    s.read("samples", c.samples);
    s.read("target_mape", c.target_mape);
    s.read("occlusion_halfwidth", c.occlusion_halfwidth);
    std::string shape = c.shape == ImageNoiseShape::Symmetric ? "symmetric" : "under_reporting";
    s.read("shape", shape);
    if (shape == "symmetric") {
      c.shape = ImageNoiseShape::Symmetric;
    } else if (shape == "under_reporting") {
      c.shape = ImageNoiseShape::UnderReporting;
    } else {
      throw ConfigError("unknown image noise shape '" + shape + "'");
    }
    s.reject_unknown();
  }
  if (root.has("force")) {
    Section s(root.at("force"), "force");
    auto& c = config.force;
    s.read("slope", c.accuracy.slope);
    s.read("intercept", c.accuracy.intercept);
    s.read("sample_rate", c.accuracy.sample_rate);
    s.read("window", c.accuracy.window);
    s.read("tolerance", c.accuracy.tolerance);
    s.read("miss_halfwidth", c.miss_halfwidth);
    s.reject_unknown();
  }
  root.reject_unknown();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

TrialConfig trial_config(const ExperimentConfig& config, Arm arm) {
  TrialConfig t;
  t.control = config.control;
  t.surface = config.surface;
  t.image = config.image;
  t.force = config.force;
  t.arm = arm;
  t.record_trace = config.write_traces;
  if (config.perfect_sensors) {
    t.image.target_mape = 0.0;
    t.force = ForceSensorConfig::perfect();
  }
  return t;
}

BatchSummary summarize(Arm arm, const std::vector<TrialRecord>& records) {
  BatchSummary s;
  s.arm = arm;
  s.trials = records.size();
  if (records.empty()) return s;
  std::size_t counts[4] = {0, 0, 0, 0};
  double success_time = 0.0;
  std::vector<double> criterion_times;
  for (const auto& r : records) {
    ++counts[static_cast<int>(r.classification)];
    if (r.classification == Classification::Success) success_time += r.time_min;
    if (r.criterion_met) criterion_times.push_back(r.criterion_time_min);
  }
  const double total = static_cast<double>(records.size());
  s.success_pct = 100.0 * static_cast<double>(counts[0]) / total;
  s.under_drill_pct = 100.0 * static_cast<double>(counts[1]) / total;
  s.over_drill_model_pct = 100.0 * static_cast<double>(counts[2]) / total;
  s.over_drill_intervened_pct = 100.0 * static_cast<double>(counts[3]) / total;
  if (counts[0] > 0) s.mean_time_success_min = success_time / static_cast<double>(counts[0]);
  if (!criterion_times.empty()) {
    std::sort(criterion_times.begin(), criterion_times.end());
    const std::size_t k = criterion_times.size();
    s.median_time_to_criterion_min =
        k % 2 ? criterion_times[k / 2] : 0.5 * (criterion_times[k / 2 - 1] + criterion_times[k / 2]);
  }
  return s;
}

BatchResult run_batch(const ExperimentConfig& config, Arm arm) {
  config.validate();
  const TrialConfig base = trial_config(config, arm);
  std::vector<RunOutcome> outcomes(config.trials);

  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      outcomes[i] = run_trial(base, TrialSeeds::split(trial_seed(config, i)));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  BatchResult result;
  result.records.reserve(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    const auto& o = outcomes[i];
    result.records.push_back(TrialRecord{i, arm, o.classification, o.drilling_time_min, trial_seed(config, i),
                                         o.criterion_met, o.criterion_time_min, o.tilt_deg});
  }
  result.summary = summarize(arm, result.records);
  if (config.write_traces) result.outcomes = std::move(outcomes);
  return result;
}

std::vector<BatchResult> ablation_suite(const ExperimentConfig& config) {
  std::vector<BatchResult> results;
  for (Arm arm : kAllArms) results.push_back(run_batch(config, arm));
  return results;
}

void write_trials_csv(std::ostream& out, const std::vector<BatchResult>& results) {
  out << "trial,arm,classification,time_min,seed\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& r : results) {
    for (const auto& t : r.records) {
      out << t.trial << ',' << arm_name(t.arm) << ',' << classification_name(t.classification) << ',' << t.time_min
          << ',' << t.seed << '\n';
    }
  }
}

std::string summary_json(const ExperimentConfig& config, const std::vector<BatchResult>& results) {
  json doc;
  doc["profile"] = std::string(profile_name(config.profile));
  doc["trials_per_arm"] = config.trials;
  doc["base_seed"] = config.base_seed;
  doc["perfect_sensors"] = config.perfect_sensors;
  json arms = json::array();
  for (const auto& r : results) {
    const auto& s = r.summary;
    json row;
    row["arm"] = std::string(arm_name(s.arm));
    row["trials"] = s.trials;
    row["success_pct"] = s.success_pct;
    row["under_drill_pct"] = s.under_drill_pct;
    row["over_drill_model_pct"] = s.over_drill_model_pct;
    row["over_drill_intervened_pct"] = s.over_drill_intervened_pct;
    row["mean_time_success_min"] = s.mean_time_success_min ? json(*s.mean_time_success_min) : json(nullptr);
    row["median_time_to_criterion_min"] =
        s.median_time_to_criterion_min ? json(*s.median_time_to_criterion_min) : json(nullptr);
    arms.push_back(row);
  }
  doc["arms"] = arms;
  return doc.dump(2) + "\n";
}

namespace {

template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace

void write_outputs(const ExperimentConfig& config, const std::vector<BatchResult>& results) {
  ensure_dir(config.output_dir);
  write_atomically(config.output_dir / "trials.csv", [&](std::ostream& out) { write_trials_csv(out, results); });
  const auto summary = summary_json(config, results);
  write_atomically(config.output_dir / "summary.json", [&](std::ostream& out) { out << summary; });
  if (!config.write_traces) return;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
      const auto name = "trace_" + std::string(arm_name(r.summary.arm)) + "_" + std::to_string(i) + ".csv";
      write_atomically(config.output_dir / name, [&](std::ostream& out) { write_trace_csv(out, r.outcomes[i].trace); });
    }
  }
}

void dump_surface(const ExperimentConfig& config) {
  ensure_dir(config.output_dir);
  const auto seeds = TrialSeeds::split(trial_seed(config, 0));
  const auto surface = generate_surface(config.surface, seeds.surface);
  const auto trajectory = make_circular_trajectory(config.control.points, config.control.diameter, 0.0);
  const auto grid = sample_grid(surface, trajectory);
  write_atomically(config.output_dir / "surface.csv",
                   [&](std::ostream& out) { write_surface_csv(out, grid, trajectory); });
}

}  // namespace drillsim
