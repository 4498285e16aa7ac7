#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drillsim/spline_geometry.hpp"

namespace drillsim {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Plane z = alpha * x + beta * y + gamma. An invalid fit carries zero
/// coefficients and means "no plane information".
struct PlaneFit {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  bool valid = false;
  std::size_t point_count = 0;
  double conditioning = 0.0;  // smaller / larger singular value of the x-y spread

  double height_at(double x, double y) const { return alpha * x + beta * y + gamma; }
};

/// Relative singular-value threshold below which the x-y spread of the
/// input is treated as collinear.
inline constexpr double kCollinearityTolerance = 1e-9;

/// Least-squares plane through `points`, minimising vertical residuals.
/// Fewer than three points or collinear x-y positions yield an invalid fit.
PlaneFit fit_plane(std::span<const Point3> points);

/// Vertical offset from every trajectory point to the fitted plane
/// (plane height minus point height). All zeros for an invalid fit.
std::vector<double> plane_offsets(const PlaneFit& fit, const TrajectoryState& trajectory);

double residual_sum_of_squares(const PlaneFit& fit, std::span<const Point3> points);

}  // namespace drillsim
