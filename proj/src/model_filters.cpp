#include "touchsmooth/model_filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace touchsmooth {

void KdeConfig::validate() const {
  if (n < 1) throw Error("kde half width must be >= 1");
  if (bandwidth_rule == BandwidthRule::kFixed && !(fixed_bandwidth > 0.0))
    throw Error("kde fixed bandwidth must be positive");
  if (sd_tol < 0.0 || move_tol < 0.0) throw Error("kde tolerances must be >= 0");
  if (max_iters < 0) throw Error("kde max_iters must be >= 0");
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

KdeTrace kde_iterate(std::span<const double> window, const KdeConfig& config) {
  if (window.empty()) throw Error("kde of an empty window");
  KdeTrace out;
  out.values.assign(window.begin(), window.end());
  double sd = sample_sd(out.values);
  out.sd_per_iteration.push_back(sd);
  const double h = config.bandwidth_rule == BandwidthRule::kFixed
                       ? config.fixed_bandwidth
                       : sd;
  if (h <= kMinBandwidth) return out;

  const double inv2h2 = 1.0 / (2.0 * h * h);
  std::vector<double> next(out.values.size());
  while (out.iterations < config.max_iters) {
    double max_move = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      double wsum = 0.0;
      double acc = 0.0;
      for (double vj : out.values) {
        const double d = vj - out.values[i];
        const double w = std::exp(-d * d * inv2h2);
        wsum += w;
        acc += w * vj;
      }
      next[i] = acc / wsum;
      max_move = std::max(max_move, std::abs(next[i] - out.values[i]));
    }
    out.values.swap(next);
    ++out.iterations;
    const double new_sd = sample_sd(out.values);
    out.sd_per_iteration.push_back(new_sd);
    const bool settled = std::abs(sd - new_sd) < config.sd_tol || max_move < config.move_tol;
    sd = new_sd;
    if (settled) break;
  }
  return out;
}

double kde_smooth(std::span<const double> window, const KdeConfig& config) {
  return kde_iterate(window, config).values[window.size() / 2];
}

KdeStage::KdeStage(KdeConfig config)
    : WindowedStage(config.n, 0, config.n), config_(config) {
  config_.validate();
}

std::unique_ptr<FilterStage> KdeStage::clone() const {
  return std::make_unique<KdeStage>(config_);
}

Vec2 KdeStage::estimate(const StageWindow& window) {
  StageWindow w = window;
  balance_head(w, config_.n);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto* part : {&w.history, &w.ahead})
    for (const Vec2& v : *part) {
      xs.push_back(v.x);
      ys.push_back(v.y);
    }
  // The current frame sits right after the history, wherever the window is
  // lopsided at the stream edges.
  const std::size_t center = w.history.size();
  return {kde_iterate(xs, config_).values[center],
          kde_iterate(ys, config_).values[center]};
}

// ---------------------------------------------------------------------------

void RegressionConfig::validate() const {
  if (m < 0 || n < 0) throw Error("regression window lengths must be >= 0");
  if (m + n < 1) throw Error("regression window needs at least two samples");
}

namespace {

bool has_two_abscissae(std::span<const double> t) {
  return std::any_of(t.begin(), t.end(), [&](double v) { return v != t.front(); });
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

LineFit fit_least_squares(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size() || t.empty()) throw Error("line fit needs paired samples");
  if (!has_two_abscissae(t)) return {0.0, mean_of(v)};
  const double tm = mean_of(t);
  const double vm = mean_of(v);
  double stt = 0.0;
  double stv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stv += (t[i] - tm) * (v[i] - vm);
  }
  const double slope = stv / stt;
  return {slope, vm - slope * tm};
}

LineFit fit_theil_sen(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size() || t.empty()) throw Error("line fit needs paired samples");
  if (!has_two_abscissae(t)) return {0.0, mean_of(v)};
  std::vector<double> slopes;
  slopes.reserve(t.size() * (t.size() - 1) / 2);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (t[i] != t[j]) slopes.push_back((v[j] - v[i]) / (t[j] - t[i]));
  const double slope = median(std::move(slopes));
  std::vector<double> offsets(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) offsets[i] = v[i] - slope * t[i];
  return {slope, median(std::move(offsets))};
}

Vec2 windowed_regression(std::span<const TracePoint> window,
                         std::int64_t eval_frame, const RegressionConfig& config,
                         std::optional<Vec2> reference) {
  if (window.empty()) throw Error("regression over an empty window");
  std::vector<Vec2> pos;
  pos.reserve(window.size());
  for (const auto& p : window) pos.push_back(p.pos());

  std::size_t drop_x = window.size();
  std::size_t drop_y = window.size();
  if (config.odd_removal != OddRemoval::kNone && window.size() >= 3) {
    if (!reference) throw Error("odd removal needs a reference point");
    std::tie(drop_x, drop_y) = flag_odd_per_axis(pos, *reference);
  }

  auto fit_axis = [&](std::size_t drop, auto coord) {
    std::vector<double> t;
    std::vector<double> v;
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (i == drop) continue;
      t.push_back(static_cast<double>(window[i].frame - eval_frame));
      v.push_back(coord(pos[i]));
    }
    const LineFit fit = config.method == RegressionMethod::kTheilSen
                            ? fit_theil_sen(t, v)
                            : fit_least_squares(t, v);
    return fit.at(0.0);
  };
  return {fit_axis(drop_x, [](Vec2 p) { return p.x; }),
          fit_axis(drop_y, [](Vec2 p) { return p.y; })};
}

namespace {

int regression_history(const RegressionConfig& c) {
  switch (c.odd_removal) {
    case OddRemoval::kNone:
      return 0;
    case OddRemoval::kVariantC:
      return 1;
    case OddRemoval::kVariantD:
      return std::max(c.n, 1);
  }
  return 0;
}

}  // namespace

RegressionStage::RegressionStage(RegressionConfig config)
    : WindowedStage(regression_history(config), config.m, config.n),
      config_(config) {
  config_.validate();
}

std::string RegressionStage::name() const {
  return config_.method == RegressionMethod::kTheilSen ? "theilsen" : "linreg";
}

std::unique_ptr<FilterStage> RegressionStage::clone() const {
  return std::make_unique<RegressionStage>(config_);
}

Vec2 RegressionStage::estimate(const StageWindow& w) {
  std::vector<TracePoint> pts;
  const auto first = w.frame - static_cast<std::int64_t>(w.past_inputs.size());
  for (std::size_t i = 0; i < w.past_inputs.size(); ++i)
    pts.push_back({first + static_cast<std::int64_t>(i), w.past_inputs[i].x,
                   w.past_inputs[i].y});
  for (std::size_t i = 0; i < w.ahead.size(); ++i)
    pts.push_back({w.frame + static_cast<std::int64_t>(i), w.ahead[i].x, w.ahead[i].y});

  std::optional<Vec2> ref;
  if (config_.odd_removal == OddRemoval::kVariantC)
    ref = odd_reference(OddVariant::kC, w.history, w.ahead);
  else if (config_.odd_removal == OddRemoval::kVariantD)
    ref = odd_reference(OddVariant::kD, w.history, w.ahead);
  return windowed_regression(pts, w.frame, config_, ref);
}

// ---------------------------------------------------------------------------

void PolarConfig::validate() const {
  r_window.validate();
  if (r_window.mode != WindowMode::kModifiedAverage &&
      r_window.mode != WindowMode::kModifiedMedian)
    throw Error("polar radius smoothing must use a modified window");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("polar alpha must be in (0, 1]");
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

namespace {

// Zero-radius samples leave both angles untouched.
void advance_theta(Vec2 rel, double alpha, std::optional<double>& raw,
                   std::optional<double>& smooth) {
  if (!(norm(rel) > 0.0)) return;
  const double a = std::atan2(rel.y, rel.x);
  const double unwrapped = raw ? *raw + wrap_angle(a - *raw) : a;
  raw = unwrapped;
  smooth = smooth ? alpha * unwrapped + (1.0 - alpha) * *smooth : unwrapped;
}

}  // namespace

PolarStage::PolarStage(PolarConfig config)
    : WindowedStage(config.r_window.n, 0, config.r_window.n), config_(config) {
  config_.validate();
}

std::unique_ptr<FilterStage> PolarStage::clone() const {
  return std::make_unique<PolarStage>(config_);
}

void PolarStage::on_reset() {
  origin_.reset();
  raw_theta_.reset();
  smoothed_theta_.reset();
}

Vec2 PolarStage::estimate(const StageWindow& window) {
  // Frames are estimated in order, so the first call sees the drag's first
  // point as its current input.
  if (!origin_) origin_ = window.ahead.front();
  const Vec2 o = *origin_;

  advance_theta(window.ahead.front() - o, config_.alpha, raw_theta_, smoothed_theta_);

  StageWindow w = window;
  balance_head(w, config_.r_window.n);
  // Radii go through the scalar window as the x component.
  std::vector<Vec2> past;
  std::vector<Vec2> ahead;
  for (const Vec2& v : w.history) past.push_back({norm(v - o), 0.0});
  for (const Vec2& v : w.ahead) ahead.push_back({norm(v - o), 0.0});
  const double r = config_.r_window.mode == WindowMode::kModifiedMedian
                       ? modified_moving_median(past, ahead).x
                       : modified_moving_average(past, ahead).x;
  const double th = smoothed_theta_.value_or(0.0);
  return o + Vec2{r * std::cos(th), r * std::sin(th)};
}

PolarResult polar_smooth_detailed(const Trace& trace, const PolarConfig& config) {
  if (trace.size() < 2) throw Error("polar smoothing needs at least two points");
  PolarStage stage(config);
  PolarResult out;
  out.smoothed = run_stage(stage, trace);
  // Theta for frame t depends only on inputs up to t, so the sequence can be
  // replayed without the radius window.
  std::optional<double> raw;
  std::optional<double> smooth;
  const Vec2 o = trace[0].pos();
  for (const auto& p : trace.points) {
    advance_theta(p.pos() - o, config.alpha, raw, smooth);
    out.smoothed_theta.push_back(smooth.value_or(0.0));
  }
  return out;
}

Trace polar_smooth(const Trace& trace, const PolarConfig& config) {
  return polar_smooth_detailed(trace, config).smoothed;
}

}  // namespace touchsmooth
