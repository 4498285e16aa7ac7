#include "drillsim/plane_fitting.hpp"

#include <Eigen/Dense>

namespace drillsim {

PlaneFit fit_plane(std::span<const Point3> points) {
  PlaneFit fit;
  fit.point_count = points.size();
  if (points.size() < 3) return fit;

  const auto count = static_cast<Eigen::Index>(points.size());
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += Eigen::Vector3d(p.x, p.y, p.z);
  mean /= static_cast<double>(count);

  // Centering decouples gamma and keeps the 2-column design well scaled.
  Eigen::MatrixXd design(count, 2);
  Eigen::VectorXd rhs(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    design(i, 0) = p.x - mean.x();
    design(i, 1) = p.y - mean.y();
    rhs(i) = p.z - mean.z();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) < kCollinearityTolerance * sv(0)) return fit;

  const Eigen::Vector2d slopes = svd.solve(rhs);
  fit.alpha = slopes(0);
  fit.beta = slopes(1);
  fit.gamma = mean.z() - fit.alpha * mean.x() - fit.beta * mean.y();
  fit.conditioning = sv(1) / sv(0);
  fit.valid = true;
  return fit;
}

std::vector<double> plane_offsets(const PlaneFit& fit, const TrajectoryState& trajectory) {
  std::vector<double> offsets(trajectory.size(), 0.0);
  if (!fit.valid) return offsets;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& p = trajectory.points[i];
    offsets[i] = fit.height_at(p.x, p.y) - p.z;
  }
  return offsets;
}

double residual_sum_of_squares(const PlaneFit& fit, std::span<const Point3> points) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double r = p.z - fit.height_at(p.x, p.y);
    sum += r * r;
  }
  return sum;
}

}  // namespace drillsim
