#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "touchsmooth/trace.hpp"

namespace touchsmooth {

enum class DragShape { kLinear, kNonlinear, kZigzag };

const char* to_string(DragShape s);
DragShape parse_shape(const std::string& s);

struct ShapeParams {
  double heading = 0.0;                      // mean direction, radians
  double arc_turn = 1.5707963267948966;      // total turn of the nonlinear arc
  int zigzag_segments = 4;
  double zigzag_turn = 1.5707963267948966;   // direction change at each corner
};

struct DragSpec {
  DragShape shape = DragShape::kLinear;
  double velocity = 10.0;      // mm/s at the first frame
  double acceleration = 0.0;   // mm/s^2 along the path
  double frame_rate = 60.0;
  double extent = 80.0;        // path length in mm
  // When set, the drag lasts this long instead of stopping at `extent`, and
  // the shape is laid out over whatever path length that covers.
  std::optional<double> duration;  // s
  ShapeParams params;
  Vec2 start{0.0, 0.0};

  void validate() const;
};

// Arc length after t seconds.
double path_length(const DragSpec& spec, double t);
// Number of frames the drag spans.
std::size_t frame_count(const DragSpec& spec);
// Point and unit tangent at arc length s along a path of total length `total`.
std::pair<Vec2, Vec2> path_point(const DragSpec& spec, double s, double total);

Trace generate_truth(const DragSpec& spec);

struct NoiseSpec {
  double sigma_perp = 0.0;   // mm, across the drag
  double sigma_along = 0.0;  // mm, along the drag
  std::uint64_t seed = 1;
  int trials = 100;

  void validate() const;
};

// Independent engine per (seed, trial) so a trial can be regenerated alone.
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

// Unit tangents estimated from neighbouring points.
std::vector<Vec2> trace_tangents(const Trace& truth);

Trace add_noise(const Trace& truth, const NoiseSpec& spec, int trial);

// Mean over trials of the noisy trace's Measure1 against the truth.
double noisy_measure1(const Trace& truth, const NoiseSpec& spec);

struct CalibrationResult {
  NoiseSpec noise;
  double achieved = 0.0;  // noisy Measure1 at the returned sigmas
  int steps = 0;
};

// Bisection on a scale s with sigma_along = s, sigma_perp = ratio * s until
// the mean noisy Measure1 over `trials` lies within `rel_tol` of the target.
CalibrationResult calibrate_noise(double target, const DragSpec& drag,
                                  double ratio, std::uint64_t seed = 1,
                                  int trials = 100, double rel_tol = 1e-3);

struct GridRow {
  double velocity;
  double acceleration;
};

// The twelve (velocity, acceleration) rows shared by the three drag tables.
std::vector<GridRow> table_grid();
std::vector<GridRow> read_grid_csv(const std::string& path);

}  // namespace touchsmooth
