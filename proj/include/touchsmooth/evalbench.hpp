#pragma once

#include <string>
#include <vector>

#include "touchsmooth/metrics.hpp"
#include "touchsmooth/pipeline.hpp"
#include "touchsmooth/synthgen.hpp"

namespace touchsmooth {

struct PresetResult {
  std::string preset;
  int group_delay = 0;
  double mse = 0.0;   // Measure1 averaged over trials
  double max = 0.0;   // Measure2
  double wall_ms = 0.0;  // mean filtering time per trace
  std::vector<double> per_trial;  // Measure1 of each trial
};

struct BenchReport {
  DragShape shape = DragShape::kLinear;
  double velocity = 0.0;
  double acceleration = 0.0;
  int trials = 0;
  std::size_t frames = 0;
  double noisy_mse = 0.0;
  double noisy_max = 0.0;
  std::vector<PresetResult> filtered;

  const PresetResult& result(const std::string& preset) const;
};

struct BenchOptions {
  NoiseSpec noise;
  std::vector<PipelineSpec> pipelines;
  int threads = 0;  // 0: hardware concurrency
};

// Filters `noise.trials` noisy copies of one drag through every pipeline.
// Trials run in parallel; results are reduced in trial order so reports do
// not depend on the thread count.
BenchReport run_row(const DragSpec& drag, const BenchOptions& options);

// One row per grid entry, using `base` for everything but velocity and
// acceleration.
std::vector<BenchReport> run_table(const DragSpec& base, const std::vector<GridRow>& grid,
                                   const BenchOptions& options);

enum class SweepAxis { kVelocity, kAcceleration };
SweepAxis parse_axis(const std::string& s);

std::vector<BenchReport> sweep(SweepAxis axis, const DragSpec& base,
                               const std::vector<double>& values,
                               const BenchOptions& options);

// The drag layout and calibrated noise the tables are run with.
DragSpec benchmark_drag(DragShape shape, double velocity = 10.0, double acceleration = 0.0);
NoiseSpec benchmark_noise(std::uint64_t seed = 1, int trials = 100);
// perp:along ratio the calibration used.
inline constexpr double kBenchmarkNoiseRatio = 2.0;

// Tables to two decimals; timing columns only when asked, so reports stay
// byte-identical across reruns by default.
std::string format_markdown(const std::vector<BenchReport>& rows, bool with_timing = false);
std::string format_csv(const std::vector<BenchReport>& rows, bool with_timing = false);
// x, preset, mse, max in long form.
std::string format_sweep_csv(SweepAxis axis, const std::vector<BenchReport>& rows);

// Mean of each preset's Measure1 over the rows.
double mean_mse(const std::vector<BenchReport>& rows, const std::string& preset);
double mean_noisy_mse(const std::vector<BenchReport>& rows);

}  // namespace touchsmooth
