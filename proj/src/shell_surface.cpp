#include "drillsim/shell_surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>

namespace drillsim {

SurfaceConfig SurfaceConfig::egg() { return SurfaceConfig{}; }

SurfaceConfig SurfaceConfig::mouse() {
  SurfaceConfig c;
  c.nominal_thickness = 300e-6;
  c.thickness_variation = 0.30;
  c.tilt_min_deg = 2.0;
  c.tilt_max_deg = 8.0;
  c.perturbation_amplitude = 30e-6;
  return c;
}

void SurfaceConfig::validate() const {
  if (!(nominal_thickness > 0.0)) throw SurfaceError("nominal thickness must be positive");
  if (!(thickness_variation >= 0.0 && thickness_variation < 1.0)) {
    throw SurfaceError("thickness variation must lie in [0, 1)");
  }
  if (!(tilt_min_deg >= 0.0 && tilt_max_deg <= 15.0 && tilt_min_deg <= tilt_max_deg)) {
    throw SurfaceError("tilt range must lie within [0, 15] degrees");
  }
  if (!(perturbation_amplitude >= 0.0)) throw SurfaceError("perturbation amplitude must be non-negative");
  if (!(min_wavelength > 0.0 && min_wavelength <= max_wavelength)) {
    throw SurfaceError("invalid wavelength range");
  }
  if (thickness_modes < 0 || height_modes < 0) throw SurfaceError("mode counts must be non-negative");
}

namespace {

double mode_sum(const std::vector<SurfaceMode>& modes, double x, double y) {
  double s = 0.0;
  for (const auto& m : modes) s += m.amplitude * std::sin(m.kx * x + m.ky * y + m.phase);
  return s;
}

// Amplitudes are normalised so that |sum| never exceeds `bound`.
std::vector<SurfaceMode> draw_modes(std::mt19937_64& rng, int count, double bound, const SurfaceConfig& cfg) {
  std::vector<SurfaceMode> modes;
  if (count <= 0 || bound == 0.0) return modes;
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> log_wl(std::log(cfg.min_wavelength), std::log(cfg.max_wavelength));
  std::uniform_real_distribution<double> weight(0.5, 1.0);
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    const double dir = angle(rng);
    const double wavenumber = kTwoPi / std::exp(log_wl(rng));
    SurfaceMode m{wavenumber * std::cos(dir), wavenumber * std::sin(dir), angle(rng), weight(rng)};
    total += m.amplitude;
    modes.push_back(m);
  }
  for (auto& m : modes) m.amplitude *= bound / total;
  return modes;
}

}  // namespace

ShellSurface::ShellSurface(SurfaceConfig config, std::uint64_t seed, double tilt_deg, double tilt_direction,
                           std::vector<SurfaceMode> height_modes, std::vector<SurfaceMode> thickness_modes)
    : config_(config),
      seed_(seed),
      tilt_deg_(tilt_deg),
      tilt_direction_(tilt_direction),
      tilt_slope_(std::tan(tilt_deg * kPi / 180.0)),
      height_modes_(std::move(height_modes)),
      thickness_modes_(std::move(thickness_modes)) {}

double ShellSurface::height(double x, double y) const {
  const double along = x * std::cos(tilt_direction_) + y * std::sin(tilt_direction_);
  return config_.base_height + tilt_slope_ * along + mode_sum(height_modes_, x, y);
}

double ShellSurface::thickness(double x, double y) const {
  return config_.nominal_thickness * (1.0 + mode_sum(thickness_modes_, x, y));
}

ShellSurface generate_surface(const SurfaceConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tilt(config.tilt_min_deg, config.tilt_max_deg);
  std::uniform_real_distribution<double> direction(-kPi, kPi);
  const double tilt_deg = config.tilt_min_deg == config.tilt_max_deg ? config.tilt_min_deg : tilt(rng);
  const double tilt_dir = direction(rng);
  auto height_modes = draw_modes(rng, config.height_modes, config.perturbation_amplitude, config);
  auto thickness_modes = draw_modes(rng, config.thickness_modes, config.thickness_variation, config);
  return ShellSurface(config, seed, tilt_deg, tilt_dir, std::move(height_modes), std::move(thickness_modes));
}

ShellGrid sample_grid(const ShellSurface& surface, const TrajectoryState& trajectory) {
  ShellGrid grid;
  grid.phi.reserve(trajectory.size());
  grid.height.reserve(trajectory.size());
  grid.thickness.reserve(trajectory.size());
  for (const auto& p : trajectory.points) {
    grid.phi.push_back(p.phi);
    grid.height.push_back(surface.height(p.x, p.y));
    grid.thickness.push_back(surface.thickness(p.x, p.y));
  }
  return grid;
}

void apply_drill(ShellState& state, const ShellGrid& grid, double tip_z, double drill_angle, double dt,
                 const DrillParams& params) {
  if (!(dt > 0.0)) throw SurfaceError("drill step must have positive duration");
  if (state.drilled_depth.size() != grid.size()) throw SurfaceError("shell state and grid differ in size");
  const double reach = params.footprint_halfwidth * (1.0 + 1e-9);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (angular_distance(grid.phi[i], drill_angle) > reach) continue;
    auto& depth = state.drilled_depth[i];
    depth = std::max(depth, grid.height[i] - tip_z);
    if (!state.ruptured && depth > grid.thickness[i] + params.rupture_margin) {
      state.ruptured = true;
      state.rupture_index = i;
    }
  }
}

CompletionVector ground_truth_completion(const ShellState& state, const ShellGrid& grid) {
  std::vector<double> c(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = state.drilled_depth[i] / grid.thickness[i];
  return CompletionVector::clamped(std::move(c));
}

void write_surface_csv(std::ostream& out, const ShellGrid& grid, const TrajectoryState& trajectory) {
  out << "index,phi_rad,x_m,y_m,height_m,thickness_m\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = trajectory.points[i];
    out << i << ',' << grid.phi[i] << ',' << p.x << ',' << p.y << ',' << grid.height[i] << ','
        << grid.thickness[i] << '\n';
  }
}

}  // namespace drillsim
