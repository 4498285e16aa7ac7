#include "drillsim/completion_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace drillsim {

CompletionVector::CompletionVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw FusionError("completion level out of [0,1] at index " + std::to_string(i) + ": " +
                        std::to_string(v));
    }
  }
}

CompletionVector CompletionVector::clamped(std::vector<double> values) {
  for (auto& v : values) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return CompletionVector(std::move(values));
}

double CompletionVector::min() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double CompletionVector::mean() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double AccuracyModel::weight(double dt) const { return std::clamp(accuracy(dt), 0.0, 100.0) / 100.0; }

std::vector<double> accuracy_weights(const AccuracyModel& model, std::size_t current_index, std::size_t n) {
  if (n == 0) throw FusionError("empty grid");
  if (current_index >= n) throw FusionError("current index outside the grid");
  std::vector<double> w(n, 0.0);
  const std::size_t window = std::min(model.window, n);
  for (std::size_t j = 0; j < window; ++j) {
    w[(current_index + j) % n] = model.weight(static_cast<double>(j) / model.sample_rate);
  }
  return w;
}

std::vector<double> upsample_image(std::span<const double> image, std::size_t n) {
  const std::size_t m = image.size();
  if (m == 0) throw FusionError("empty image reading");
  if (m > n) throw FusionError("image has more samples than the grid");
  if (n % m != 0) throw FusionError("image sample count must divide the grid size");

  const std::size_t ratio = n / m;
  std::vector<double> out(n);
  for (std::size_t j = 0; j < m; ++j) {
    const double left = image[j];
    const double right = image[(j + 1) % m];
    out[j * ratio] = left;
    for (std::size_t k = 1; k < ratio; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(ratio);
      out[j * ratio + k] = left + t * (right - left);
    }
  }
  return out;
}

std::vector<double> pad_force(std::span<const double> force, std::size_t current_index, std::size_t n) {
  if (force.size() > n) throw FusionError("force window longer than the grid");
  if (current_index >= n) throw FusionError("current index outside the grid");
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < force.size(); ++j) out[(current_index + j) % n] = force[j];
  return out;
}

CompletionVector fuse(std::span<const double> image_up, std::span<const double> force_pad,
                      std::span<const double> force_weight) {
  const std::size_t n = image_up.size();
  if (force_pad.size() != n || force_weight.size() != n) {
    throw FusionError("fusion inputs differ in length");
  }
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = force_weight[i];
    if (!(w >= 0.0 && w <= 1.0)) throw FusionError("force weight outside [0,1]");
    c[i] = (1.0 - w) * image_up[i] + w * force_pad[i];
  }
  return CompletionVector::clamped(std::move(c));
}

CompletionVector update_progress(const CompletionVector& previous, const CompletionVector& latest) {
  if (previous.size() != latest.size()) throw FusionError("progress vectors differ in length");
  std::vector<double> out(previous.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(previous[i], latest[i]);
  return CompletionVector(std::move(out));
}

}  // namespace drillsim
