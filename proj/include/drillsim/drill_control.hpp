#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drillsim/completion_fusion.hpp"
#include "drillsim/plane_fitting.hpp"
#include "drillsim/sensor_models.hpp"
#include "drillsim/shell_surface.hpp"
#include "drillsim/spline_geometry.hpp"

namespace drillsim {

struct ControlConfig {
  double descent_speed = -6e-6;   // m/s, nominal v_z (negative is down)
  double diameter = 8e-3;         // m
  double update_rate = 30.0;      // Hz
  double turn_period = 16.0;      // s per revolution
  double criterion_fraction = 0.80;
  double criterion_level = 0.85;
  std::size_t points = 320;
  double timeout_min = 40.0;
  double initial_clearance = 30e-6;  // m above the highest surface point
  double start_angle = 0.0;          // rad
  DrillParams drill;
  /// The patch comes out when this fraction of points is truly drilled to
  /// at least criterion_level.
  double removable_fraction = 0.95;
  /// Offsets are applied only once the contacted points span the plane well
  /// enough: PlaneFit::conditioning at least this value.
  double plane_min_conditioning = 0.3;
  /// Where the monotone max is taken: false keeps a running max of the image
  /// progress bar only and feeds the fused vector to the damper as is; true
  /// also takes the running max of the fused vector.
  bool fused_progress_max = true;
  /// Plane offsets move only points whose completion is still zero.
  bool offsets_untouched_only = true;
  /// After the stop criterion fires the loop keeps cutting for at least
  /// finishing_min_turns revolutions and until the estimate shows
  /// removable_fraction at criterion_level, for at most finishing_turns.
  double finishing_min_turns = 2.0;
  double finishing_turns = 3.0;

  double period() const { return 1.0 / update_rate; }
  double angular_speed() const { return kTwoPi / turn_period; }
  void validate() const;
};

enum class Arm { Baseline, Force, Plane, Full };

inline constexpr Arm kAllArms[] = {Arm::Baseline, Arm::Force, Arm::Plane, Arm::Full};

std::string_view arm_name(Arm arm);
std::optional<Arm> parse_arm(std::string_view name);
inline bool uses_force(Arm arm) { return arm == Arm::Force || arm == Arm::Full; }
inline bool uses_plane_fit(Arm arm) { return arm == Arm::Plane || arm == Arm::Full; }

enum class Classification { Success, UnderDrill, OverDrillModel, OverDrillIntervened };

std::string_view classification_name(Classification c);

struct TraceRecord {
  std::size_t cycle = 0;
  double sim_time_s = 0.0;
  double drill_angle_rad = 0.0;
  double tip_z = 0.0;
  double min_c = 0.0;
  double mean_c = 0.0;
  bool criterion_met = false;
  bool ruptured = false;
  PlaneFit plane;

  friend bool operator==(const TraceRecord& a, const TraceRecord& b) {
    return a.cycle == b.cycle && a.sim_time_s == b.sim_time_s && a.drill_angle_rad == b.drill_angle_rad &&
           a.tip_z == b.tip_z && a.min_c == b.min_c && a.mean_c == b.mean_c &&
           a.criterion_met == b.criterion_met && a.ruptured == b.ruptured && a.plane.valid == b.plane.valid &&
           a.plane.alpha == b.plane.alpha && a.plane.beta == b.plane.beta && a.plane.gamma == b.plane.gamma &&
           a.plane.point_count == b.plane.point_count;
  }
};

struct RunOutcome {
  Classification classification = Classification::UnderDrill;
  double drilling_time_min = 0.0;
  double criterion_time_min = 0.0;  // valid when criterion_met
  bool criterion_met = false;
  bool ruptured = false;
  bool removable = false;
  bool timed_out = false;
  std::size_t cycles = 0;
  double tilt_deg = 0.0;
  CompletionVector final_estimate;
  CompletionVector final_truth;
  std::vector<double> final_z;
  std::vector<TraceRecord> trace;

  friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

/// Independent random streams of one trial.
struct TrialSeeds {
  std::uint64_t surface = 0;
  std::uint64_t image = 0;
  std::uint64_t force = 0;

  /// Splits one 64-bit trial seed into three decorrelated streams.
  static TrialSeeds split(std::uint64_t seed);
};

struct TrialConfig {
  ControlConfig control;
  SurfaceConfig surface = SurfaceConfig::egg();
  ImageSensorConfig image = ImageSensorConfig::egg();
  ForceSensorConfig force = ForceSensorConfig::egg();
  Arm arm = Arm::Full;
  bool record_trace = true;
  /// Fault injection: mark the membrane ruptured at this simulated time.
  std::optional<double> inject_rupture_at_s;

  void validate() const;
};

/// State exposed to an observer after every control cycle.
struct CycleView {
  std::size_t cycle;
  double sim_time_s;
  const TrajectoryState& trajectory;
  const CompletionVector& estimate;
  const CompletionVector& truth;
  const ShellState& shell;
};

using CycleObserver = std::function<void(const CycleView&)>;

/// v_i = (1 - c_i) * v_z.
std::vector<double> damped_velocities(const CompletionVector& c, double descent_speed);

struct PlanStep {
  TrajectoryState trajectory;
  SplineCurve curve;
};

/// z_i += v_i * T + min(o_i, 0) with v_i from the damper, then rebuilds the
/// spline. A positive offset never lifts a point.
PlanStep advance_plan(const TrajectoryState& trajectory, const CompletionVector& c,
                      std::span<const double> plane_offsets, double descent_speed, double period);

/// True iff at least `fraction` of the points reach `level`.
bool completion_criterion(const CompletionVector& c, double fraction = 0.80, double level = 0.85);

Classification classify_outcome(bool criterion_met, bool ruptured, bool removable);

RunOutcome run_trial(const TrialConfig& config, const TrialSeeds& seeds, const CycleObserver& observer = {});

/// CSV with columns cycle,sim_time_s,drill_angle_rad,min_c,mean_c,criterion_met,ruptured.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace drillsim
