#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace drillsim {

struct FusionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Per-point drilling completion levels, every element in [0, 1].
class CompletionVector {
 public:
  CompletionVector() = default;
  /// Throws FusionError if any element is outside [0, 1] or not finite.
  explicit CompletionVector(std::vector<double> values);

  static CompletionVector zeros(std::size_t n) { return CompletionVector(std::vector<double>(n, 0.0)); }
  /// Clamps every element into [0, 1] instead of rejecting it.
  static CompletionVector clamped(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double min() const;
  double mean() const;

  friend bool operator==(const CompletionVector&, const CompletionVector&) = default;

 private:
  std::vector<double> values_;
};

/// Force-recognizer accuracy as a function of prediction horizon,
/// acc(dt) = slope * dt + intercept, in percent.
struct AccuracyModel {
  double slope = -7.94;       // %/s
  double intercept = 81.43;   // %
  double sample_rate = 20.0;  // Hz
  std::size_t window = 80;    // samples
  double tolerance = 0.05;    // completion units

  static AccuracyModel egg() { return {}; }
  static AccuracyModel mouse() { return {-7.07, 74.01, 20.0, 80, 0.05}; }

  /// Raw affine accuracy, percent; may leave [0, 100].
  double accuracy(double dt) const { return slope * dt + intercept; }
  /// Accuracy clamped to [0, 100] and scaled to [0, 1].
  double weight(double dt) const;
};

/// Force weights on the n-point grid: window sample j (horizon j / f) lands
/// on grid index (current_index + j) mod n; everything else is zero.
std::vector<double> accuracy_weights(const AccuracyModel& model, std::size_t current_index, std::size_t n);

/// Periodic linear interpolation of m evenly spaced samples onto n points;
/// sample j sits at grid index j * n / m.
std::vector<double> upsample_image(std::span<const double> image, std::size_t n);

/// Scatters a window of force estimates onto the n-point grid starting at
/// `current_index`, zero elsewhere.
std::vector<double> pad_force(std::span<const double> force, std::size_t current_index, std::size_t n);

/// c = (1 - w) * image + w * force, clamped to [0, 1].
CompletionVector fuse(std::span<const double> image_up, std::span<const double> force_pad,
                      std::span<const double> force_weight);

/// Elementwise maximum: the progress bar never moves backwards.
CompletionVector update_progress(const CompletionVector& previous, const CompletionVector& latest);

}  // namespace drillsim
