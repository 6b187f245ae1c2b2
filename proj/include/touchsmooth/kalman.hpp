#pragma once

#include <Eigen/Dense>
#include <span>

#include "touchsmooth/filter_stage.hpp"

namespace touchsmooth {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// State layout: (x, y, x', y', x'', y''). Units are mm, mm per time unit and
// mm per time unit squared, where the time unit is whatever `dt` counts in.
struct KalmanConfig {
  double dt = 1.0;          // one frame
  int noise_window = 10;    // previous noisy inputs used for sd_x, sd_y
  double q_coeff = 0.01;    // q = q_coeff * (sd_x + sd_y) / 2
  double scale_fact = 100;  // P0 = scale_fact * Q
  double sd_floor = 1e-6;   // mm
  // Inputs are passed through until this many previous noisy points exist,
  // so the first covariance is built from a real SD rather than the floor.
  int warmup = 2;

  void validate() const;
};

Matrix6d build_transition(double dt);
// q times the white-noise-jerk discretization, per axis
// [dt^5/20 dt^4/8 dt^3/6; dt^4/8 dt^3/3 dt^2/2; dt^3/6 dt^2/2 dt].
Matrix6d build_process_noise(double q, double dt);
// Rows observing x and y.
Eigen::Matrix<double, 2, 6> observation_matrix();

struct KalmanState {
  Vector6d x = Vector6d::Zero();
  Matrix6d P = Matrix6d::Zero();
  bool initialized = false;
};

// Per-axis sample SD of the trailing window, floored.
Vec2 trailing_sd(std::span<const Vec2> trailing, double floor);

struct KalmanStepResult {
  KalmanState state;
  DelayedOutput output;
};

// Rebuilds Q and R from the trailing noisy inputs, then predicts and
// corrects with a Joseph-form covariance update. An uninitialized state is
// seeded from the measurement (zero velocity and acceleration, P = scale * Q).
KalmanStepResult kalman_step(const KalmanState& state,
                             const TracePoint& measurement,
                             std::span<const Vec2> trailing_noisy,
                             const KalmanConfig& config);

class KalmanStage final : public WindowedStage {
 public:
  explicit KalmanStage(KalmanConfig config);
  std::string name() const override { return "kalman"; }
  std::unique_ptr<FilterStage> clone() const override;
  const KalmanState& state() const { return state_; }

 protected:
  Vec2 estimate(const StageWindow& w) override;
  void on_reset() override { state_ = KalmanState{}; }

 private:
  KalmanConfig config_;
  KalmanState state_;
};

}  // namespace touchsmooth
