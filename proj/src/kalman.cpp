#include "touchsmooth/kalman.hpp"

#include <algorithm>
#include <cmath>

namespace touchsmooth {

void KalmanConfig::validate() const {
  if (!(dt > 0.0)) throw Error("kalman dt must be positive");
  if (noise_window < 2) throw Error("kalman noise window must be >= 2");
  if (!(q_coeff >= 0.0)) throw Error("kalman q coefficient must be >= 0");
  if (!(scale_fact > 0.0)) throw Error("kalman scale factor must be positive");
  if (!(sd_floor > 0.0)) throw Error("kalman sd floor must be positive");
  if (warmup < 0 || warmup > noise_window)
    throw Error("kalman warmup must lie in [0, noise window]");
}

Matrix6d build_transition(double dt) {
  Matrix6d a = Matrix6d::Identity();
  for (int axis = 0; axis < 2; ++axis) {
    a(axis, axis + 2) = dt;
    a(axis, axis + 4) = 0.5 * dt * dt;
    a(axis + 2, axis + 4) = dt;
  }
  return a;
}

Matrix6d build_process_noise(double q, double dt) {
  const double d2 = dt * dt;
  const double d3 = d2 * dt;
  const double d4 = d3 * dt;
  const double d5 = d4 * dt;
  const double block[3][3] = {{d5 / 20, d4 / 8, d3 / 6},
                              {d4 / 8, d3 / 3, d2 / 2},
                              {d3 / 6, d2 / 2, dt}};
  Matrix6d m = Matrix6d::Zero();
  for (int axis = 0; axis < 2; ++axis)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(axis + 2 * i, axis + 2 * j) = q * block[i][j];
  return m;
}

Eigen::Matrix<double, 2, 6> observation_matrix() {
  Eigen::Matrix<double, 2, 6> h = Eigen::Matrix<double, 2, 6>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

Vec2 trailing_sd(std::span<const Vec2> trailing, double floor) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Vec2& v : trailing) {
    xs.push_back(v.x);
    ys.push_back(v.y);
  }
  auto sd = [floor](const std::vector<double>& v) {
    if (v.size() < 2) return floor;
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    return std::max(std::sqrt(ss / static_cast<double>(v.size() - 1)), floor);
  };
  return {sd(xs), sd(ys)};
}

KalmanStepResult kalman_step(const KalmanState& state,
                             const TracePoint& measurement,
                             std::span<const Vec2> trailing_noisy,
                             const KalmanConfig& config) {
  const Vec2 sd = trailing_sd(trailing_noisy, config.sd_floor);
  const double q = config.q_coeff * 0.5 * (sd.x + sd.y);
  const Matrix6d Q = build_process_noise(q, config.dt);
  // R holds the SDs themselves, as the noise model prescribes, not variances.
  const Eigen::Matrix2d R = Eigen::Vector2d(sd.x, sd.y).asDiagonal();
  const Eigen::Vector2d z(measurement.x, measurement.y);

  KalmanStepResult out;
  KalmanState& s = out.state;
  if (!state.initialized) {
    s.x = Vector6d::Zero();
    s.x.head<2>() = z;
    s.P = config.scale_fact * Q;
    s.initialized = true;
    out.output = {measurement, 0};
    return out;
  }

  const Matrix6d A = build_transition(config.dt);
  const auto H = observation_matrix();
  const Vector6d x_pred = A * state.x;
  const Matrix6d P_pred = A * state.P * A.transpose() + Q;

  const Eigen::Matrix2d S = H * P_pred * H.transpose() + R;
  const Eigen::Matrix<double, 6, 2> K =
      P_pred * H.transpose() * S.inverse();
  s.x = x_pred + K * (z - H * x_pred);
  const Matrix6d I_KH = Matrix6d::Identity() - K * H;
  s.P = I_KH * P_pred * I_KH.transpose() + K * R * K.transpose();
  s.P = 0.5 * (s.P + s.P.transpose());
  s.initialized = true;
  out.output = {{measurement.frame, s.x(0), s.x(1)}, 0};
  return out;
}

KalmanStage::KalmanStage(KalmanConfig config)
    : WindowedStage(0, config.noise_window, 0), config_(config) {
  config_.validate();
}

std::unique_ptr<FilterStage> KalmanStage::clone() const {
  return std::make_unique<KalmanStage>(config_);
}

Vec2 KalmanStage::estimate(const StageWindow& w) {
  const Vec2 z = w.ahead.front();
  if (!state_.initialized &&
      static_cast<int>(w.past_inputs.size()) < config_.warmup)
    return z;
  auto step = kalman_step(state_, {w.frame, z.x, z.y}, w.past_inputs, config_);
  state_ = step.state;
  return step.output.point.pos();
}

}  // namespace touchsmooth
