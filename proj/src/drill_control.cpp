#include "drillsim/drill_control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace drillsim {

void ControlConfig::validate() const {
  if (!(descent_speed < 0.0)) throw std::invalid_argument("descent speed must be negative");
  if (!(diameter > 0.0)) throw std::invalid_argument("diameter must be positive");
  if (!(update_rate > 0.0)) throw std::invalid_argument("update rate must be positive");
  if (!(turn_period > 0.0)) throw std::invalid_argument("turn period must be positive");
  if (!(criterion_fraction > 0.0 && criterion_fraction <= 1.0)) {
    throw std::invalid_argument("criterion fraction must lie in (0, 1]");
  }
  if (!(criterion_level > 0.0 && criterion_level <= 1.0)) {
    throw std::invalid_argument("criterion level must lie in (0, 1]");
  }
  if (!(removable_fraction > 0.0 && removable_fraction <= 1.0)) {
    throw std::invalid_argument("removable fraction must lie in (0, 1]");
  }
  if (points < 3) throw std::invalid_argument("need at least 3 trajectory points");
  if (!(timeout_min > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (!(initial_clearance >= 0.0)) throw std::invalid_argument("initial clearance must be non-negative");
  if (!(plane_min_conditioning >= 0.0 && plane_min_conditioning <= 1.0)) {
    throw std::invalid_argument("plane conditioning threshold must lie in [0, 1]");
  }
  if (!(finishing_min_turns >= 0.0 && finishing_turns >= finishing_min_turns)) {
    throw std::invalid_argument("finishing turns must satisfy 0 <= min <= max");
  }
  if (!(drill.footprint_halfwidth >= 0.0 && drill.rupture_margin >= 0.0)) {
    throw std::invalid_argument("drill footprint and rupture margin must be non-negative");
  }
}

void TrialConfig::validate() const {
  control.validate();
  surface.validate();
  image.validate(control.points);
  force.validate();
}

std::string_view arm_name(Arm arm) {
  switch (arm) {
    case Arm::Baseline: return "baseline";
    case Arm::Force: return "force";
    case Arm::Plane: return "plane";
    case Arm::Full: return "full";
  }
  return "unknown";
}

std::optional<Arm> parse_arm(std::string_view name) {
  for (Arm a : kAllArms) {
    if (arm_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view classification_name(Classification c) {
  switch (c) {
    case Classification::Success: return "success";
    case Classification::UnderDrill: return "under_drill";
    case Classification::OverDrillModel: return "over_drill_model";
    case Classification::OverDrillIntervened: return "over_drill_intervened";
  }
  return "unknown";
}

TrialSeeds TrialSeeds::split(std::uint64_t seed) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  auto stream = [&](std::uint32_t tag) {
    std::seed_seq seq{lo, hi, tag};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  };
  return TrialSeeds{stream(0x5u), stream(0x1au), stream(0xf0u)};
}

std::vector<double> damped_velocities(const CompletionVector& c, double descent_speed) {
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - c[i]) * descent_speed;
  return v;
}

PlanStep advance_plan(const TrajectoryState& trajectory, const CompletionVector& c,
                      std::span<const double> plane_offsets, double descent_speed, double period) {
  const std::size_t n = trajectory.size();
  if (c.size() != n || plane_offsets.size() != n) throw std::invalid_argument("plan inputs differ in length");
  if (!(period > 0.0)) throw std::invalid_argument("planning period must be positive");

  PlanStep step{trajectory, {}};
  const auto v = damped_velocities(c, descent_speed);
  for (std::size_t i = 0; i < n; ++i) {
    const double move = v[i] * period + std::min(plane_offsets[i], 0.0);
    step.trajectory.points[i].z += std::min(move, 0.0);
  }
  step.curve = build_spline(step.trajectory);
  return step;
}

bool completion_criterion(const CompletionVector& c, double fraction, double level) {
  const auto required = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(c.size()) - 1e-9));
  const auto reached = static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [&](double v) { return v >= level; }));
  return reached >= required;
}

Classification classify_outcome(bool criterion_met, bool ruptured, bool removable) {
  if (criterion_met) {
    if (ruptured) return Classification::OverDrillModel;
    return removable ? Classification::Success : Classification::UnderDrill;
  }
  return ruptured ? Classification::OverDrillIntervened : Classification::UnderDrill;
}

namespace {

std::vector<double> fit_offsets(const TrajectoryState& trajectory, const CompletionVector& c,
                                const ControlConfig& ctl, PlaneFit& fit) {
  std::vector<Point3> contacted;
  contacted.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (c[i] != 0.0) {
      const auto& p = trajectory.points[i];
      contacted.push_back({p.x, p.y, p.z});
    }
  }
  fit = fit_plane(contacted);
  if (fit.valid && fit.conditioning < ctl.plane_min_conditioning) return std::vector<double>(trajectory.size(), 0.0);
  auto offsets = plane_offsets(fit, trajectory);
  if (ctl.offsets_untouched_only) {
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (c[i] != 0.0) offsets[i] = 0.0;
    }
  }
  return offsets;
}

}  // namespace

RunOutcome run_trial(const TrialConfig& config, const TrialSeeds& seeds, const CycleObserver& observer) {
  config.validate();
  const auto& ctl = config.control;
  const std::size_t n = ctl.points;
  const double period = ctl.period();
  const double omega = ctl.angular_speed();

  const ShellSurface surface = generate_surface(config.surface, seeds.surface);
  TrajectoryState trajectory = make_circular_trajectory(n, ctl.diameter, 0.0);
  const ShellGrid grid = sample_grid(surface, trajectory);
  const double start_z = *std::max_element(grid.height.begin(), grid.height.end()) + ctl.initial_clearance;
  for (auto& p : trajectory.points) p.z = start_z;
  SplineCurve curve = build_spline(trajectory);

  SimulatedImageRecognizer image(config.image, n, seeds.image);
  std::optional<SimulatedForceRecognizer> force;
  if (uses_force(config.arm)) force.emplace(config.force, n, seeds.force);
  const bool plane_fit_enabled = uses_plane_fit(config.arm);

  ShellState shell = ShellState::untouched(n);
  CompletionVector image_progress = CompletionVector::zeros(n);
  CompletionVector estimate = CompletionVector::zeros(n);
  const std::vector<double> no_force(n, 0.0);
  const auto max_cycles = static_cast<std::size_t>(std::ceil(ctl.timeout_min * 60.0 * ctl.update_rate));

  RunOutcome outcome;
  outcome.tilt_deg = surface.tilt_deg();
  std::size_t cycle = 0;
  std::size_t stop_cycle = 0;
  const auto finishing_cycles =
      static_cast<std::size_t>(std::ceil(ctl.finishing_turns * ctl.turn_period * ctl.update_rate - 1e-9));
  const auto min_finishing_cycles =
      static_cast<std::size_t>(std::ceil(ctl.finishing_min_turns * ctl.turn_period * ctl.update_rate - 1e-9));
  CompletionVector truth = ground_truth_completion(shell, grid);
  auto time_at = [&](std::size_t k) { return static_cast<double>(k) * period; };

  while (true) {
    const double angle = ctl.start_angle + omega * time_at(cycle);
    const std::size_t drill_index = trajectory.nearest_index(angle);
    const WorldObservation obs{truth, angle, drill_index};

    const auto image_out = image.recognize(obs);
    image_progress = update_progress(image_progress, CompletionVector(upsample_image(image_out.values, n)));
    CompletionVector fused;
    if (force) {
      const auto force_out = force->recognize(obs);
      const auto padded = pad_force(force_out.values, drill_index, n);
      const auto weights = accuracy_weights(config.force.accuracy, drill_index, n);
      fused = fuse(image_progress.values(), padded, weights);
    } else {
      fused = image_progress;
    }
    estimate = ctl.fused_progress_max ? update_progress(estimate, fused) : std::move(fused);

    if (!outcome.criterion_met && completion_criterion(estimate, ctl.criterion_fraction, ctl.criterion_level)) {
      outcome.criterion_met = true;
      stop_cycle = cycle;
      if (config.record_trace) {
        outcome.trace.push_back(TraceRecord{cycle, time_at(cycle), wrap_angle(angle), eval_spline(curve, angle),
                                            estimate.min(), estimate.mean(), true, shell.ruptured, {}});
      }
    }
    if (outcome.criterion_met &&
        (cycle >= stop_cycle + finishing_cycles ||
         (cycle >= stop_cycle + min_finishing_cycles &&
          completion_criterion(estimate, ctl.removable_fraction, ctl.criterion_level)))) {
      break;
    }
    if (!outcome.criterion_met && cycle >= max_cycles) {
      outcome.timed_out = true;
      break;
    }

    PlaneFit fit;
    std::vector<double> offsets = plane_fit_enabled
                                      ? fit_offsets(trajectory, estimate, ctl, fit)
                                      : std::vector<double>(n, 0.0);
    auto step = advance_plan(trajectory, estimate, offsets, ctl.descent_speed, period);
    trajectory = std::move(step.trajectory);
    curve = std::move(step.curve);

    ++cycle;
    const double time = time_at(cycle);
    const double tip_angle = ctl.start_angle + omega * time;
    const double tip_z = eval_spline(curve, tip_angle);
    apply_drill(shell, grid, tip_z, tip_angle, period, ctl.drill);
    if (config.inject_rupture_at_s && time >= *config.inject_rupture_at_s && !shell.ruptured) {
      shell.ruptured = true;
      shell.rupture_index = trajectory.nearest_index(tip_angle);
    }
    truth = ground_truth_completion(shell, grid);

    if (config.record_trace) {
      outcome.trace.push_back(TraceRecord{cycle, time, wrap_angle(tip_angle), tip_z, estimate.min(), estimate.mean(),
                                          outcome.criterion_met, shell.ruptured, fit});
    }
    if (observer) observer(CycleView{cycle, time, trajectory, estimate, truth, shell});
    if (shell.ruptured) break;
  }

  const auto reached = std::count_if(truth.begin(), truth.end(), [&](double v) { return v >= ctl.criterion_level; });
  outcome.removable = static_cast<double>(reached) >= ctl.removable_fraction * static_cast<double>(n) - 1e-9;
  outcome.ruptured = shell.ruptured;
  outcome.classification = classify_outcome(outcome.criterion_met, outcome.ruptured, outcome.removable);
  outcome.cycles = cycle;
  outcome.drilling_time_min = std::max(time_at(cycle), period) / 60.0;
  if (outcome.criterion_met) outcome.criterion_time_min = std::max(time_at(stop_cycle), period) / 60.0;
  outcome.final_estimate = estimate;
  outcome.final_truth = truth;
  outcome.final_z = trajectory.heights();
  return outcome;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "cycle,sim_time_s,drill_angle_rad,min_c,mean_c,criterion_met,ruptured\n";
  out << std::setprecision(10);
  for (const auto& r : trace) {
    out << r.cycle << ',' << r.sim_time_s << ',' << r.drill_angle_rad << ',' << r.min_c << ',' << r.mean_c << ','
        << (r.criterion_met ? 1 : 0) << ',' << (r.ruptured ? 1 : 0) << '\n';
  }
}

}  // namespace drillsim
