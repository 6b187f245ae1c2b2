#pragma once

#include <span>
#include <utility>
#include <vector>

#include "touchsmooth/filter_stage.hpp"

namespace touchsmooth {

enum class WindowMode {
  kModifiedAverage,  // past side holds the filter's own previous outputs
  kModifiedMedian,
  kPlainAverage,     // past side holds raw inputs
  kPlainMedian,
};

struct WindowConfig {
  int n = 5;  // half width; the stage delays by n frames
  WindowMode mode = WindowMode::kModifiedAverage;

  void validate() const;
};

double median(std::vector<double> values);

// Per-axis mean of the previous outputs, the current input and the future
// inputs. For the plain variant pass previous raw inputs as `previous`.
Vec2 modified_moving_average(std::span<const Vec2> previous,
                             std::span<const Vec2> current_and_future);
Vec2 modified_moving_median(std::span<const Vec2> previous,
                            std::span<const Vec2> current_and_future);

// Odd-one-removed references.
//  A / C: the previous smoothed output.
//  B / D: mean of the previous smoothed outputs, the current and the future
//         raw inputs.
enum class OddVariant { kA, kB, kC, kD };

struct OddOneRemovedConfig {
  int n = 2;
  OddVariant variant = OddVariant::kA;

  void validate() const;
};

// `current_and_future` must hold at least the current input; it stands in
// for a missing previous output at stream start.
Vec2 odd_reference(OddVariant variant, std::span<const Vec2> previous,
                   std::span<const Vec2> current_and_future);

// Drops the window point farthest (Euclidean) from `reference` and averages
// the rest. Ties go to the earliest point. Windows shorter than three points
// are averaged without removal.
Vec2 odd_one_removed(std::span<const Vec2> window, Vec2 reference);
std::size_t farthest_index(std::span<const Vec2> window, Vec2 reference);

// Per axis, the index of the sample farthest from the reference coordinate
// (earliest on ties).
std::pair<std::size_t, std::size_t> flag_odd_per_axis(
    std::span<const Vec2> window, Vec2 reference);

struct SavitzkyGolayConfig {
  int order = 2;
  int taps = 5;

  void validate() const;
  int group_delay() const { return (taps - 1) / 2; }
};

// Least-squares smoothing weights that evaluate a degree-`order` polynomial
// fit at offset 0, for samples at the given integer offsets.
std::vector<double> savitzky_golay_weights(int order,
                                           std::span<const int> offsets);
// Centered weights for `taps` samples (offsets -(taps-1)/2 .. (taps-1)/2).
std::vector<double> savitzky_golay_coefficients(int order, int taps);

Vec2 savitzky_golay(std::span<const Vec2> window,
                    std::span<const double> weights);

class MovingWindowStage final : public WindowedStage {
 public:
  explicit MovingWindowStage(WindowConfig config);
  std::string name() const override;
  std::unique_ptr<FilterStage> clone() const override;
  const WindowConfig& config() const { return config_; }

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  WindowConfig config_;
};

// Variants A and B; the window's past side holds previous smoothed outputs.
class OddOneRemovedStage final : public WindowedStage {
 public:
  explicit OddOneRemovedStage(OddOneRemovedConfig config);
  std::string name() const override;
  std::unique_ptr<FilterStage> clone() const override;

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  OddOneRemovedConfig config_;
};

class SavitzkyGolayStage final : public WindowedStage {
 public:
  explicit SavitzkyGolayStage(SavitzkyGolayConfig config);
  std::string name() const override { return "sg"; }
  std::unique_ptr<FilterStage> clone() const override;

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  SavitzkyGolayConfig config_;
  std::vector<double> full_weights_;
};

// Emits its input unchanged `delay` frames late.
class PureDelayStage final : public WindowedStage {
 public:
  explicit PureDelayStage(int delay) : WindowedStage(0, 0, delay), delay_(delay) {}
  std::string name() const override { return "delay"; }
  std::unique_ptr<FilterStage> clone() const override {
    return std::make_unique<PureDelayStage>(delay_);
  }

 protected:
  Vec2 estimate(const StageWindow& w) override { return w.ahead.front(); }

 private:
  int delay_;
};

}  // namespace touchsmooth
