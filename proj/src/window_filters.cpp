#include "touchsmooth/window_filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace touchsmooth {

void WindowConfig::validate() const {
  if (n < 1) throw Error("window half width must be >= 1");
}

void OddOneRemovedConfig::validate() const {
  if (n < 1) throw Error("window half width must be >= 1");
}

void SavitzkyGolayConfig::validate() const {
  if (taps < 1 || taps % 2 == 0) throw Error("savitzky-golay taps must be odd");
  if (order < 0 || order >= taps)
    throw Error("savitzky-golay order must be below the tap count");
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty window");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

Vec2 modified_moving_average(std::span<const Vec2> previous,
                             std::span<const Vec2> current_and_future) {
  const std::size_t count = previous.size() + current_and_future.size();
  if (count == 0) throw Error("moving average of an empty window");
  Vec2 sum;
  for (const Vec2& v : previous) sum = sum + v;
  for (const Vec2& v : current_and_future) sum = sum + v;
  return (1.0 / static_cast<double>(count)) * sum;
}

Vec2 modified_moving_median(std::span<const Vec2> previous,
                            std::span<const Vec2> current_and_future) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(previous.size() + current_and_future.size());
  ys.reserve(xs.capacity());
  for (auto part : {previous, current_and_future})
    for (const Vec2& v : part) {
      xs.push_back(v.x);
      ys.push_back(v.y);
    }
  return {median(std::move(xs)), median(std::move(ys))};
}

Vec2 odd_reference(OddVariant variant, std::span<const Vec2> previous,
                   std::span<const Vec2> current_and_future) {
  if (current_and_future.empty()) throw Error("odd reference needs the current input");
  switch (variant) {
    case OddVariant::kA:
    case OddVariant::kC:
      return previous.empty() ? current_and_future.front() : previous.back();
    case OddVariant::kB:
    case OddVariant::kD:
      return modified_moving_average(previous, current_and_future);
  }
  return current_and_future.front();
}

std::size_t farthest_index(std::span<const Vec2> window, Vec2 reference) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Vec2 d = window[i] - reference;
    const double d2 = d.x * d.x + d.y * d.y;
    if (d2 > best_d) {
      best_d = d2;
      best = i;
    }
  }
  return best;
}

Vec2 odd_one_removed(std::span<const Vec2> window, Vec2 reference) {
  if (window.empty()) throw Error("odd-one-removed of an empty window");
  if (window.size() < 3) return modified_moving_average({}, window);
  const std::size_t drop = farthest_index(window, reference);
  Vec2 sum;
  for (std::size_t i = 0; i < window.size(); ++i)
    if (i != drop) sum = sum + window[i];
  return (1.0 / static_cast<double>(window.size() - 1)) * sum;
}

std::pair<std::size_t, std::size_t> flag_odd_per_axis(
    std::span<const Vec2> window, Vec2 reference) {
  if (window.empty()) throw Error("odd flagging of an empty window");
  std::size_t ix = 0;
  std::size_t iy = 0;
  double dx = -1.0;
  double dy = -1.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double ax = std::abs(window[i].x - reference.x);
    const double ay = std::abs(window[i].y - reference.y);
    if (ax > dx) {
      dx = ax;
      ix = i;
    }
    if (ay > dy) {
      dy = ay;
      iy = i;
    }
  }
  return {ix, iy};
}

std::vector<double> savitzky_golay_weights(int order,
                                           std::span<const int> offsets) {
  if (offsets.empty()) throw Error("savitzky-golay needs at least one sample");
  const int degree = std::min(order, static_cast<int>(offsets.size()) - 1);
  const auto rows = static_cast<Eigen::Index>(offsets.size());
  Eigen::MatrixXd design(rows, degree + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      design(i, k) = p;
      p *= offsets[static_cast<std::size_t>(i)];
    }
  }
  // Row 0 of the pseudo-inverse: the fitted polynomial's value at offset 0.
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(degree + 1);
  e0(0) = 1.0;
  const Eigen::MatrixXd normal = design.transpose() * design;
  const Eigen::VectorXd c = normal.colPivHouseholderQr().solve(e0);
  const Eigen::VectorXd w = design * c;
  return {w.data(), w.data() + w.size()};
}

std::vector<double> savitzky_golay_coefficients(int order, int taps) {
  SavitzkyGolayConfig{order, taps}.validate();
  const int half = (taps - 1) / 2;
  std::vector<int> offsets;
  for (int i = -half; i <= half; ++i) offsets.push_back(i);
  return savitzky_golay_weights(order, offsets);
}

Vec2 savitzky_golay(std::span<const Vec2> window,
                    std::span<const double> weights) {
  if (window.size() != weights.size())
    throw Error("savitzky-golay window and weight lengths differ");
  Vec2 out;
  for (std::size_t i = 0; i < window.size(); ++i) out = out + weights[i] * window[i];
  return out;
}

namespace {

bool is_modified(WindowMode m) {
  return m == WindowMode::kModifiedAverage || m == WindowMode::kModifiedMedian;
}

}  // namespace

MovingWindowStage::MovingWindowStage(WindowConfig config)
    : WindowedStage(is_modified(config.mode) ? config.n : 0,
                    is_modified(config.mode) ? 0 : config.n, config.n),
      config_(config) {
  config_.validate();
}

std::string MovingWindowStage::name() const {
  switch (config_.mode) {
    case WindowMode::kModifiedAverage:
      return "mma";
    case WindowMode::kModifiedMedian:
      return "mmed";
    case WindowMode::kPlainAverage:
      return "ma";
    case WindowMode::kPlainMedian:
      return "med";
  }
  return "window";
}

std::unique_ptr<FilterStage> MovingWindowStage::clone() const {
  return std::make_unique<MovingWindowStage>(config_);
}

Vec2 MovingWindowStage::estimate(const StageWindow& window) {
  StageWindow w = window;
  balance_head(w, config_.n);
  const auto& past = is_modified(config_.mode) ? w.history : w.past_inputs;
  const bool avg = config_.mode == WindowMode::kModifiedAverage ||
                   config_.mode == WindowMode::kPlainAverage;
  return avg ? modified_moving_average(past, w.ahead)
             : modified_moving_median(past, w.ahead);
}

OddOneRemovedStage::OddOneRemovedStage(OddOneRemovedConfig config)
    : WindowedStage(config.n, 0, config.n), config_(config) {
  config_.validate();
  if (config.variant == OddVariant::kC || config.variant == OddVariant::kD)
    throw Error("odd-one-removed variants C and D only flag samples for regression");
}

std::string OddOneRemovedStage::name() const {
  return config_.variant == OddVariant::kA ? "oor-a" : "oor-b";
}

std::unique_ptr<FilterStage> OddOneRemovedStage::clone() const {
  return std::make_unique<OddOneRemovedStage>(config_);
}

Vec2 OddOneRemovedStage::estimate(const StageWindow& window) {
  StageWindow w = window;
  balance_head(w, config_.n);
  const Vec2 ref = odd_reference(config_.variant, w.history, w.ahead);
  std::vector<Vec2> pts(w.history.begin(), w.history.end());
  pts.insert(pts.end(), w.ahead.begin(), w.ahead.end());
  return odd_one_removed(pts, ref);
}

SavitzkyGolayStage::SavitzkyGolayStage(SavitzkyGolayConfig config)
    : WindowedStage(0, config.group_delay(), config.group_delay()),
      config_(config) {
  config_.validate();
  full_weights_ = savitzky_golay_coefficients(config_.order, config_.taps);
}

std::unique_ptr<FilterStage> SavitzkyGolayStage::clone() const {
  return std::make_unique<SavitzkyGolayStage>(config_);
}

Vec2 SavitzkyGolayStage::estimate(const StageWindow& window) {
  const int half = config_.group_delay();
  StageWindow w = window;
  if (!w.flushing) balance_head(w, half);
  std::vector<Vec2> pts(w.past_inputs.begin(), w.past_inputs.end());
  pts.insert(pts.end(), w.ahead.begin(), w.ahead.end());
  if (static_cast<int>(pts.size()) == config_.taps)
    return savitzky_golay(pts, full_weights_);
  // Shortened window at a stream edge: refit on the samples that exist.
  std::vector<int> offsets;
  const int first = -static_cast<int>(w.past_inputs.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    offsets.push_back(first + static_cast<int>(i));
  return savitzky_golay(pts, savitzky_golay_weights(config_.order, offsets));
}

}  // namespace touchsmooth
