#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace drillsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct GeometryError : std::domain_error {
  using std::domain_error::domain_error;
};

/// One measure point of the circular drill path. Positions in meters,
/// `phi` in radians within (-pi, pi].
struct TrajectoryPoint {
  std::size_t index = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double rho = 0.0;
  double phi = 0.0;
};

/// The n discretized drill-path points, sorted by increasing angle.
/// Only `z` changes during a run; x, y, rho, phi are fixed at construction.
struct TrajectoryState {
  double diameter = 0.0;
  std::vector<TrajectoryPoint> points;

  std::size_t size() const { return points.size(); }
  double spacing() const { return kTwoPi / static_cast<double>(points.size()); }

  std::vector<double> heights() const;
  std::vector<double> angles() const;

  /// Grid index whose angle is nearest to `angle` (any real value).
  std::size_t nearest_index(double angle) const;
};

/// Angle of grid point k on an n-point circle: -pi + (k + 1) * 2pi / n.
double grid_angle(std::size_t k, std::size_t n);

/// Builds n equally spaced points on a circle of diameter `diameter`
/// centred on the origin, all at height `z0`. The last point sits at pi.
TrajectoryState make_circular_trajectory(std::size_t n, double diameter, double z0);

/// Polar coordinates of (x, y). Throws GeometryError at the origin.
std::pair<double, double> to_cylindrical(double x, double y);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Absolute angular distance on the circle, in [0, pi].
double angular_distance(double a, double b);

/// Cubic s(phi) = a + b*u + c*u^2 + d*u^3 with u = phi - phi_left, on
/// [phi_left, phi_right].
struct SplineSegment {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double phi_left = 0.0;
  double phi_right = 0.0;

  double value(double phi) const {
    const double u = phi - phi_left;
    return a + u * (b + u * (c + u * d));
  }
  double slope(double phi) const {
    const double u = phi - phi_left;
    return b + u * (2.0 * c + u * 3.0 * d);
  }
};

/// Periodic piecewise cubic over the full turn. Segment i spans
/// [phi_i, phi_{i+1}]; the last one wraps to phi_0 + 2*pi.
class SplineCurve {
 public:
  SplineCurve() = default;
  SplineCurve(std::vector<SplineSegment> segments, std::vector<double> node_derivatives);

  const std::vector<SplineSegment>& segments() const { return segments_; }
  const std::vector<double>& node_derivatives() const { return node_derivatives_; }
  std::size_t size() const { return segments_.size(); }

  /// Index of the segment containing `phi` after reduction into
  /// [phi_0, phi_0 + 2*pi); also returns the reduced angle.
  std::pair<std::size_t, double> locate(double phi) const;

  double derivative(double phi) const;

 private:
  std::vector<SplineSegment> segments_;
  std::vector<double> node_derivatives_;
};

/// First derivative at every node of the periodic constrained spline.
/// The derivative is the harmonic mean of the adjacent secant slopes when
/// both have the same sign and zero otherwise; neighbours of the first and
/// last node wrap around the circle.
std::vector<double> node_derivatives(std::span<const double> z, std::span<const double> phi);

/// Solves the 4x4 Hermite system for one segment.
SplineSegment fit_segment(double phi_left, double z_left, double dz_left,
                          double phi_right, double z_right, double dz_right);

SplineCurve build_spline(const TrajectoryState& trajectory);
SplineCurve build_spline(std::span<const double> z, std::span<const double> phi);

double eval_spline(const SplineCurve& curve, double phi);

}  // namespace drillsim
