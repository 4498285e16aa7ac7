#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "drillsim/completion_fusion.hpp"
#include "drillsim/spline_geometry.hpp"

namespace drillsim {

struct SurfaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the synthetic shell. Tilt is drawn uniformly from
/// [tilt_min_deg, tilt_max_deg] with a random downhill direction.
struct SurfaceConfig {
  double nominal_thickness = 350e-6;   // m
  double thickness_variation = 0.15;   // bound on relative deviation
  double tilt_min_deg = 3.0;
  double tilt_max_deg = 10.0;
  double perturbation_amplitude = 20e-6;  // m, bound on height deviation from the plane
  double base_height = 0.0;               // m, surface height at the circle centre
  double min_wavelength = 1.5e-3;         // m
  double max_wavelength = 12e-3;          // m
  int thickness_modes = 6;
  int height_modes = 4;

  static SurfaceConfig egg();
  static SurfaceConfig mouse();

  void validate() const;
};

/// One planar sinusoid amplitude * sin(kx * x + ky * y + phase).
struct SurfaceMode {
  double kx = 0.0;
  double ky = 0.0;
  double phase = 0.0;
  double amplitude = 0.0;
};

/// Deterministic top-height and thickness fields.
class ShellSurface {
 public:
  ShellSurface() = default;
  ShellSurface(SurfaceConfig config, std::uint64_t seed, double tilt_deg, double tilt_direction,
               std::vector<SurfaceMode> height_modes, std::vector<SurfaceMode> thickness_modes);

  double height(double x, double y) const;
  double thickness(double x, double y) const;

  const SurfaceConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  double tilt_deg() const { return tilt_deg_; }
  double tilt_direction() const { return tilt_direction_; }

 private:
  SurfaceConfig config_;
  std::uint64_t seed_ = 0;
  double tilt_deg_ = 0.0;
  double tilt_direction_ = 0.0;
  double tilt_slope_ = 0.0;
  std::vector<SurfaceMode> height_modes_;
  std::vector<SurfaceMode> thickness_modes_;
};

ShellSurface generate_surface(const SurfaceConfig& config, std::uint64_t seed);

/// Surface fields sampled at the trajectory points.
struct ShellGrid {
  std::vector<double> phi;
  std::vector<double> height;
  std::vector<double> thickness;

  std::size_t size() const { return phi.size(); }
};

ShellGrid sample_grid(const ShellSurface& surface, const TrajectoryState& trajectory);

struct DrillParams {
  double footprint_halfwidth = 2.0 * kTwoPi / 320.0;  // rad
  double rupture_margin = 20e-6;                      // m below the membrane
};

/// Removal bookkeeping for one trial. Depth is measured down from the
/// local top surface.
struct ShellState {
  std::vector<double> drilled_depth;
  bool ruptured = false;
  std::optional<std::size_t> rupture_index;

  static ShellState untouched(std::size_t n) { return ShellState{std::vector<double>(n, 0.0), false, {}}; }
};

/// Cuts every point within the footprint of `drill_angle` down to the tip
/// height and flags a rupture when a point passes thickness + margin.
void apply_drill(ShellState& state, const ShellGrid& grid, double tip_z, double drill_angle, double dt,
                 const DrillParams& params);

/// clamp(depth / thickness, 0, 1) per point.
CompletionVector ground_truth_completion(const ShellState& state, const ShellGrid& grid);

/// CSV with columns index,phi_rad,x_m,y_m,height_m,thickness_m.
void write_surface_csv(std::ostream& out, const ShellGrid& grid, const TrajectoryState& trajectory);

}  // namespace drillsim
