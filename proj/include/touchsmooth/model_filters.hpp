#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "touchsmooth/filter_stage.hpp"
#include "touchsmooth/window_filters.hpp"

namespace touchsmooth {

// ---------------------------------------------------------------------------
// Kernel density (blurring mean-shift) smoothing.

enum class BandwidthRule { kWindowSd, kFixed };

struct KdeConfig {
  int n = 2;  // window is 2n+1 samples
  BandwidthRule bandwidth_rule = BandwidthRule::kWindowSd;
  double fixed_bandwidth = 1.0;  // mm, used with kFixed
  double sd_tol = 1e-4;          // mm
  double move_tol = 1e-4;        // mm
  int max_iters = 50;

  void validate() const;
};

inline constexpr double kMinBandwidth = 1e-9;

struct KdeTrace {
  std::vector<double> values;           // converged window
  std::vector<double> sd_per_iteration;  // sd before the first and after each pass
  int iterations = 0;
};

double sample_sd(std::span<const double> values);

// Every pass replaces each window value with the Gaussian-weighted mean of
// the window. The bandwidth comes from the input window and stays fixed
// while iterating.
KdeTrace kde_iterate(std::span<const double> window, const KdeConfig& config);
// Converged value at the window center.
double kde_smooth(std::span<const double> window, const KdeConfig& config);

class KdeStage final : public WindowedStage {
 public:
  explicit KdeStage(KdeConfig config);
  std::string name() const override { return "kde"; }
  std::unique_ptr<FilterStage> clone() const override;

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  KdeConfig config_;
};

// ---------------------------------------------------------------------------
// Windowed line fit against the frame index.

enum class RegressionMethod { kLeastSquares, kTheilSen };
enum class OddRemoval { kNone, kVariantC, kVariantD };

struct RegressionConfig {
  int m = 7;  // past inputs
  int n = 3;  // future inputs; also the group delay
  RegressionMethod method = RegressionMethod::kLeastSquares;
  OddRemoval odd_removal = OddRemoval::kNone;

  void validate() const;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double t) const { return intercept + slope * t; }
};

// Both fall back to a flat line through the mean when fewer than two
// distinct abscissae are present.
LineFit fit_least_squares(std::span<const double> t, std::span<const double> v);
LineFit fit_theil_sen(std::span<const double> t, std::span<const double> v);

// Fits x(frame) and y(frame) independently over `window` and evaluates both
// at `eval_frame`. With odd removal the sample flagged per axis against
// `reference` is left out of that axis' fit.
Vec2 windowed_regression(std::span<const TracePoint> window,
                         std::int64_t eval_frame, const RegressionConfig& config,
                         std::optional<Vec2> reference = std::nullopt);

class RegressionStage final : public WindowedStage {
 public:
  explicit RegressionStage(RegressionConfig config);
  std::string name() const override;
  std::unique_ptr<FilterStage> clone() const override;

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  RegressionConfig config_;
};

// ---------------------------------------------------------------------------
// Smoothing in polar coordinates about the first point of the drag.

struct PolarConfig {
  WindowConfig r_window{5, WindowMode::kModifiedAverage};
  double alpha = 0.3;  // exponential smoothing factor for theta

  void validate() const;
};

// Wraps an angle difference into (-pi, pi].
double wrap_angle(double a);

class PolarStage final : public WindowedStage {
 public:
  explicit PolarStage(PolarConfig config);
  std::string name() const override { return "polar"; }
  std::unique_ptr<FilterStage> clone() const override;
  // Unwrapped smoothed angle of the most recent estimate (0 before any).
  double smoothed_theta() const { return smoothed_theta_.value_or(0.0); }

 protected:
  Vec2 estimate(const StageWindow& w) override;
  void on_reset() override;

 private:
  PolarConfig config_;
  std::optional<Vec2> origin_;
  std::optional<double> raw_theta_;       // last unwrapped raw angle
  std::optional<double> smoothed_theta_;  // exponentially smoothed, unwrapped
};

struct PolarResult {
  Trace smoothed;                      // indexed by estimated frame
  std::vector<double> smoothed_theta;  // unwrapped, per frame
};

PolarResult polar_smooth_detailed(const Trace& trace, const PolarConfig& config);
Trace polar_smooth(const Trace& trace, const PolarConfig& config);

}  // namespace touchsmooth
