#include "drillsim/sensor_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drillsim {

namespace {

constexpr double kUnseen = std::numeric_limits<double>::quiet_NaN();

double draw_factor(double sigma, ImageNoiseShape shape, Rng& rng) {
  if (sigma == 0.0) return 1.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(rng);
  return shape == ImageNoiseShape::Symmetric ? std::exp(sigma * z) : std::exp(-sigma * std::abs(z));
}

bool is_occluded(std::size_t grid_index, std::size_t n, double drill_angle, double halfwidth) {
  return angular_distance(grid_angle(grid_index, n), drill_angle) <= halfwidth * (1.0 + 1e-9);
}

}  // namespace

void ImageSensorConfig::validate(std::size_t grid_size) const {
  if (samples == 0 || samples > grid_size || grid_size % samples != 0) {
    throw std::invalid_argument("image sample count must divide the grid size");
  }
  if (!(target_mape >= 0.0 && target_mape < 100.0)) throw std::invalid_argument("image MAPE must lie in [0, 100)");
  if (!(occlusion_halfwidth >= 0.0)) throw std::invalid_argument("occlusion half-width must be non-negative");
}

double image_noise_mape(double sigma, ImageNoiseShape shape) {
  const double g = std::exp(0.5 * sigma * sigma);
  if (shape == ImageNoiseShape::Symmetric) return g * std::erf(sigma / std::sqrt(2.0));
  return 1.0 - g * std::erfc(sigma / std::sqrt(2.0));
}

double image_noise_sigma(double target_mape, ImageNoiseShape shape) {
  if (!(target_mape >= 0.0 && target_mape < 100.0)) throw std::invalid_argument("image MAPE must lie in [0, 100)");
  const double target = target_mape / 100.0;
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 10.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (image_noise_mape(mid, shape) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ImageReading image_recognize(const CompletionVector& truth, double drill_angle, const ImageSensorConfig& cfg,
                             std::span<const double> previous, Rng& rng) {
  const std::size_t n = truth.size();
  cfg.validate(n);
  const std::size_t m = cfg.samples;
  if (!previous.empty() && previous.size() != m) throw std::invalid_argument("previous reading has wrong length");
  const std::size_t ratio = n / m;
  const double sigma = image_noise_sigma(cfg.target_mape, cfg.shape);

  ImageReading reading{std::vector<double>(m, 0.0), std::vector<bool>(m, false)};
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = j * ratio;
    if (is_occluded(k, n, drill_angle, cfg.occlusion_halfwidth)) {
      reading.occluded[j] = true;
      reading.values[j] = previous.empty() ? 0.0 : previous[j];
      continue;
    }
    reading.values[j] = std::clamp(truth[k] * draw_factor(sigma, cfg.shape, rng), 0.0, 1.0);
  }
  return reading;
}

SimulatedImageRecognizer::SimulatedImageRecognizer(ImageSensorConfig cfg, std::size_t grid_size, std::uint64_t seed)
    : cfg_(cfg),
      grid_size_(grid_size),
      sigma_(image_noise_sigma(cfg.target_mape, cfg.shape)),
      rng_(seed),
      last_value_(cfg.samples, 0.0),
      seen_truth_(cfg.samples, kUnseen),
      factor_(cfg.samples, 1.0),
      was_occluded_(cfg.samples, false) {
  cfg_.validate(grid_size);
}

RecognizerOutput SimulatedImageRecognizer::recognize(const WorldObservation& observation) {
  const auto& truth = observation.truth;
  if (truth.size() != grid_size_) throw std::invalid_argument("observation grid size mismatch");
  const std::size_t m = cfg_.samples;
  const std::size_t ratio = grid_size_ / m;

  RecognizerOutput out;
  out.values.resize(m);
  out.grid_index.resize(m);
  out.occluded.assign(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = j * ratio;
    out.grid_index[j] = k;
    if (is_occluded(k, grid_size_, observation.drill_angle, cfg_.occlusion_halfwidth)) {
      out.occluded[j] = true;
      out.values[j] = last_value_[j];
      was_occluded_[j] = true;
      continue;
    }
    const double t = truth[k];
    if (t != seen_truth_[j] || (was_occluded_[j] && cfg_.redraw_on_revisit)) {
      factor_[j] = draw_factor(sigma_, cfg_.shape, rng_);
      seen_truth_[j] = t;
      was_occluded_[j] = false;
    }
    last_value_[j] = std::clamp(t * factor_[j], 0.0, 1.0);
    out.values[j] = last_value_[j];
  }
  return out;
}

void ForceSensorConfig::validate() const {
  if (accuracy.window == 0) throw std::invalid_argument("force window must be non-empty");
  if (!(accuracy.sample_rate > 0.0)) throw std::invalid_argument("force sample rate must be positive");
  if (!(accuracy.tolerance > 0.0)) throw std::invalid_argument("force tolerance must be positive");
  if (!(miss_halfwidth >= accuracy.tolerance)) {
    throw std::invalid_argument("miss band must be at least as wide as the tolerance band");
  }
}

ForceDraw draw_force(const ForceSensorConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> hit(-cfg.accuracy.tolerance, cfg.accuracy.tolerance);
  std::uniform_real_distribution<double> miss(-cfg.miss_halfwidth, cfg.miss_halfwidth);
  ForceDraw d;
  d.u = unit(rng);
  d.hit_error = hit(rng);
  d.miss_error = miss(rng);
  return d;
}

double force_hit_probability(const ForceSensorConfig& cfg, double dt) {
  const double acc = cfg.accuracy.weight(dt);
  const double chance = cfg.accuracy.tolerance / cfg.miss_halfwidth;
  if (chance >= 1.0) return 0.0;
  return std::clamp((acc - chance) / (1.0 - chance), 0.0, 1.0);
}

double force_predict(double truth, double dt, const ForceSensorConfig& cfg, const ForceDraw& draw) {
  if (truth <= 0.0) return 0.0;
  const bool hit = draw.u < force_hit_probability(cfg, dt);
  if (hit && cfg.exact_hits) return truth;
  return std::clamp(truth + (hit ? draw.hit_error : draw.miss_error), 0.0, 1.0);
}

std::vector<double> force_recognize(std::span<const double> truth_window, const ForceSensorConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<double> out(truth_window.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double dt = static_cast<double>(j) / cfg.accuracy.sample_rate;
    out[j] = force_predict(truth_window[j], dt, cfg, draw_force(cfg, rng));
  }
  return out;
}

SimulatedForceRecognizer::SimulatedForceRecognizer(ForceSensorConfig cfg, std::size_t grid_size, std::uint64_t seed)
    : cfg_(cfg), grid_size_(grid_size), rng_(seed), last_call_(grid_size, 0), draws_(grid_size) {
  cfg_.validate();
}

RecognizerOutput SimulatedForceRecognizer::recognize(const WorldObservation& observation) {
  const auto& truth = observation.truth;
  if (truth.size() != grid_size_) throw std::invalid_argument("observation grid size mismatch");
  const std::size_t window = std::min(cfg_.accuracy.window, grid_size_);
  ++calls_;

  RecognizerOutput out;
  out.values.resize(window);
  out.grid_index.resize(window);
  out.occluded.assign(window, false);
  for (std::size_t j = 0; j < window; ++j) {
    const std::size_t k = (observation.drill_index + j) % grid_size_;
    const double t = truth[k];
    // A point entering the look-ahead window gets a fresh draw.
    if (last_call_[k] + 1 != calls_) draws_[k] = draw_force(cfg_, rng_);
    last_call_[k] = calls_;
    const double dt = static_cast<double>(j) / cfg_.accuracy.sample_rate;
    out.values[j] = force_predict(t, dt, cfg_, draws_[k]);
    out.grid_index[j] = k;
  }
  return out;
}

}  // namespace drillsim
