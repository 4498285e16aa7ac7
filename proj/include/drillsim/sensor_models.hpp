#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "drillsim/completion_fusion.hpp"
#include "drillsim/spline_geometry.hpp"

namespace drillsim {

using Rng = std::mt19937_64;

/// What a recognizer is allowed to see of the world in one cycle.
struct WorldObservation {
  const CompletionVector& truth;  // ground-truth completion on the n-point grid
  double drill_angle = 0.0;
  std::size_t drill_index = 0;
};

/// Estimates tagged with the grid point each one describes.
struct RecognizerOutput {
  std::vector<double> values;
  std::vector<std::size_t> grid_index;
  std::vector<bool> occluded;
};

/// Common surface for completion recognizers; a learned model can replace
/// either simulated stand-in without touching the planner.
class CompletionRecognizer {
 public:
  virtual ~CompletionRecognizer() = default;
  virtual RecognizerOutput recognize(const WorldObservation& observation) = 0;
};

// ---------------------------------------------------------------------------
// Image recognizer

/// Shape of the multiplicative image error factor F (reading = truth * F).
enum class ImageNoiseShape {
  /// F = exp(sigma * Z): errors of both signs, median 1.
  Symmetric,
  /// F = exp(-sigma * |Z|): the recognizer only ever under-reports.
  UnderReporting,
};

struct ImageSensorConfig {
  std::size_t samples = 32;
  double target_mape = 15.05;                             // percent
  double occlusion_halfwidth = 3.0 * kTwoPi / 320.0;      // rad
  ImageNoiseShape shape = ImageNoiseShape::UnderReporting;
  bool redraw_on_revisit = true;  // fresh factor when a sample leaves the occlusion arc

  static ImageSensorConfig egg() { return {}; }
  static ImageSensorConfig mouse() {
    ImageSensorConfig c;
    c.target_mape = 24.32;
    return c;
  }

  void validate(std::size_t grid_size) const;
};

/// Expected |F - 1| (as a fraction) of the noise factor for a given sigma.
double image_noise_mape(double sigma, ImageNoiseShape shape);

/// Sigma whose expected absolute percentage error equals `target_mape`.
double image_noise_sigma(double target_mape, ImageNoiseShape shape);

struct ImageReading {
  std::vector<double> values;  // m samples
  std::vector<bool> occluded;
};

/// One noisy image reading. Sample j looks at grid point j * n / m; samples
/// within the occlusion arc of the drill repeat `previous` (or 0 without
/// history). Fresh noise is drawn for every visible sample.
ImageReading image_recognize(const CompletionVector& truth, double drill_angle, const ImageSensorConfig& cfg,
                             std::span<const double> previous, Rng& rng);

/// Stateful image stand-in. A sample's noise factor persists between frames
/// and is redrawn when the completion there changes or the sample comes back
/// into view after the drill has passed, so repeated frames of a static
/// scene agree.
class SimulatedImageRecognizer final : public CompletionRecognizer {
 public:
  SimulatedImageRecognizer(ImageSensorConfig cfg, std::size_t grid_size, std::uint64_t seed);

  RecognizerOutput recognize(const WorldObservation& observation) override;

  const ImageSensorConfig& config() const { return cfg_; }

 private:
  ImageSensorConfig cfg_;
  std::size_t grid_size_;
  double sigma_;
  Rng rng_;
  std::vector<double> last_value_;
  std::vector<double> seen_truth_;
  std::vector<double> factor_;
  std::vector<bool> was_occluded_;
};

// ---------------------------------------------------------------------------
// Force recognizer

struct ForceSensorConfig {
  AccuracyModel accuracy = AccuracyModel::egg();
  double miss_halfwidth = 0.3;  // half-width of the error band of a miss
  bool exact_hits = false;      // a hit reports the truth itself

  static ForceSensorConfig egg() { return {}; }
  static ForceSensorConfig mouse() { return {AccuracyModel::mouse(), 0.3, false}; }
  /// Noise-free: every prediction is a hit and hits are exact.
  static ForceSensorConfig perfect() { return {{0.0, 100.0, 20.0, 80, 0.05}, 0.3, true}; }

  void validate() const;
};

/// Random inputs of one force prediction.
struct ForceDraw {
  double u = 0.0;          // uniform [0, 1), selects hit or miss
  double hit_error = 0.0;  // uniform within the tolerance band
  double miss_error = 0.0; // uniform within the miss band
};

ForceDraw draw_force(const ForceSensorConfig& cfg, Rng& rng);

/// Probability of drawing from the tolerance band at horizon `dt`, chosen
/// so that the total within-tolerance rate equals acc(dt) even though a
/// miss can land inside the tolerance band by chance.
double force_hit_probability(const ForceSensorConfig& cfg, double dt);

/// A single prediction. Zero truth (no contact recorded there) reads 0.
double force_predict(double truth, double dt, const ForceSensorConfig& cfg, const ForceDraw& draw);

/// K predictions for the K grid points ahead of the drill; sample j has
/// horizon j / f. Draws are independent across the window.
std::vector<double> force_recognize(std::span<const double> truth_window, const ForceSensorConfig& cfg, Rng& rng);

/// Stateful force stand-in. A grid point gets a fresh draw when it enters
/// the look-ahead window and keeps it while it stays inside, so the
/// prediction for a point only changes with its horizon and its truth.
class SimulatedForceRecognizer final : public CompletionRecognizer {
 public:
  SimulatedForceRecognizer(ForceSensorConfig cfg, std::size_t grid_size, std::uint64_t seed);

  RecognizerOutput recognize(const WorldObservation& observation) override;

  const ForceSensorConfig& config() const { return cfg_; }

 private:
  ForceSensorConfig cfg_;
  std::size_t grid_size_;
  Rng rng_;
  std::size_t calls_ = 0;
  std::vector<std::size_t> last_call_;  // 1-based call that last covered each point
  std::vector<ForceDraw> draws_;
};

}  // namespace drillsim
