#include "drillsim/spline_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <Eigen/Dense>

namespace drillsim {

std::vector<double> TrajectoryState::heights() const {
  std::vector<double> z(points.size());
  std::transform(points.begin(), points.end(), z.begin(), [](const auto& p) { return p.z; });
  return z;
}

std::vector<double> TrajectoryState::angles() const {
  std::vector<double> phi(points.size());
  std::transform(points.begin(), points.end(), phi.begin(), [](const auto& p) { return p.phi; });
  return phi;
}

std::size_t TrajectoryState::nearest_index(double angle) const {
  const auto n = static_cast<long>(points.size());
  const long k = std::lround((wrap_angle(angle) + kPi) / spacing()) - 1;
  return static_cast<std::size_t>(((k % n) + n) % n);
}

double grid_angle(std::size_t k, std::size_t n) {
  return -kPi + static_cast<double>(k + 1) * (kTwoPi / static_cast<double>(n));
}

TrajectoryState make_circular_trajectory(std::size_t n, double diameter, double z0) {
  if (n < 3) throw GeometryError("trajectory needs at least 3 points");
  if (!(diameter > 0.0)) throw GeometryError("trajectory diameter must be positive");

  TrajectoryState state;
  state.diameter = diameter;
  state.points.reserve(n);
  const double radius = 0.5 * diameter;
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = grid_angle(k, n);
    TrajectoryPoint p;
    p.index = k;
    p.x = radius * std::cos(angle);
    p.y = radius * std::sin(angle);
    p.z = z0;
    std::tie(p.rho, p.phi) = to_cylindrical(p.x, p.y);
    state.points.push_back(p);
  }
  return state;
}

std::pair<double, double> to_cylindrical(double x, double y) {
  if (x == 0.0 && y == 0.0) throw GeometryError("polar angle undefined at the origin");
  double phi = std::atan2(y, x);
  // atan2 returns -pi for (negative x, -0.0); the canonical range excludes it.
  if (phi == -kPi) phi = kPi;
  return {std::hypot(x, y), phi};
}

double wrap_angle(double angle) {
  double r = std::fmod(angle + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

SplineCurve::SplineCurve(std::vector<SplineSegment> segments, std::vector<double> node_derivatives)
    : segments_(std::move(segments)), node_derivatives_(std::move(node_derivatives)) {}

std::pair<std::size_t, double> SplineCurve::locate(double phi) const {
  if (segments_.empty()) throw GeometryError("empty spline");
  const double start = segments_.front().phi_left;
  double reduced = phi;
  if (!(phi >= start && phi < start + kTwoPi)) {
    double u = phi - start;
    u -= kTwoPi * std::floor(u / kTwoPi);
    if (u >= kTwoPi) u = 0.0;
    reduced = start + u;
  }
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), reduced,
                                   [](double v, const SplineSegment& s) { return v < s.phi_left; });
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - segments_.begin()) - 1));
  return {idx, reduced};
}

double SplineCurve::derivative(double phi) const {
  const auto [idx, reduced] = locate(phi);
  return segments_[idx].slope(reduced);
}

std::vector<double> node_derivatives(std::span<const double> z, std::span<const double> phi) {
  const std::size_t n = z.size();
  if (phi.size() != n) throw GeometryError("z and phi lengths differ");
  if (n < 3) throw GeometryError("constrained spline needs at least 3 nodes");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(phi[i] > phi[i - 1])) throw GeometryError("node angles must be strictly increasing");
  }
  if (!(phi[n - 1] - phi[0] < kTwoPi)) throw GeometryError("node angles span a full turn");

  std::vector<double> slopes(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i == 0) ? n - 1 : i - 1;
    const std::size_t next = (i == n - 1) ? 0 : i + 1;
    const double phi_prev = (i == 0) ? phi[prev] - kTwoPi : phi[prev];
    const double phi_next = (i == n - 1) ? phi[next] + kTwoPi : phi[next];
    const double dz_right = z[next] - z[i];
    const double dz_left = z[i] - z[prev];
    // A zero difference makes the product non-positive, so the divisions
    // below only run with both differences nonzero.
    if (dz_right * dz_left > 0.0) {
      slopes[i] = 2.0 / ((phi_next - phi[i]) / dz_right + (phi[i] - phi_prev) / dz_left);
    }
  }
  return slopes;
}

SplineSegment fit_segment(double phi_left, double z_left, double dz_left,
                          double phi_right, double z_right, double dz_right) {
  if (!(phi_left < phi_right)) {
    throw GeometryError("degenerate spline segment: phi_left=" + std::to_string(phi_left) +
                        " phi_right=" + std::to_string(phi_right));
  }
  // Local coordinate u = phi - phi_left, so the left rows are trivial.
  const double h = phi_right - phi_left;
  Eigen::Matrix4d system;
  system << 1.0, 0.0, 0.0, 0.0,
            1.0, h, h * h, h * h * h,
            0.0, 1.0, 0.0, 0.0,
            0.0, 1.0, 2.0 * h, 3.0 * h * h;
  const Eigen::Vector4d rhs(z_left, z_right, dz_left, dz_right);

  const auto lu = system.fullPivLu();
  Eigen::Vector4d coef = lu.solve(rhs);
  coef += lu.solve(rhs - system * coef);

  return SplineSegment{coef[0], coef[1], coef[2], coef[3], phi_left, phi_right};
}

SplineCurve build_spline(std::span<const double> z, std::span<const double> phi) {
  auto slopes = node_derivatives(z, phi);
  const std::size_t n = z.size();
  std::vector<SplineSegment> segments;
  segments.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    segments.push_back(fit_segment(phi[i], z[i], slopes[i], phi[i + 1], z[i + 1], slopes[i + 1]));
  }
  segments.push_back(
      fit_segment(phi[n - 1], z[n - 1], slopes[n - 1], phi[0] + kTwoPi, z[0], slopes[0]));
  return SplineCurve(std::move(segments), std::move(slopes));
}

SplineCurve build_spline(const TrajectoryState& trajectory) {
  const auto z = trajectory.heights();
  const auto phi = trajectory.angles();
  return build_spline(z, phi);
}

double eval_spline(const SplineCurve& curve, double phi) {
  const auto [idx, reduced] = curve.locate(phi);
  return curve.segments()[idx].value(reduced);
}

}  // namespace drillsim
