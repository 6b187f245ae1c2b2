#include "touchsmooth/pde.hpp"

#include <algorithm>
#include <cmath>

namespace touchsmooth {

void PdeConfig::validate() const {
  if (!(k > 0.0)) throw Error("pde k must be positive");
  if (!(dt_step > 0.0 && dt_step <= 0.5)) throw Error("pde dt-step must be in (0, 0.5]");
  if (max_iters < 1) throw Error("pde max-iters must be >= 1");
  if (!(conv_tol >= 0.0)) throw Error("pde conv-tol must be >= 0");
  if (buffer < 3) throw Error("pde buffer must hold at least 3 frames");
}

double influence(double d, double k) {
  const double r = d / k;
  return 1.0 / (1.0 + r * r);
}

namespace {

// Writes one pass into `out` and returns the largest change.
double step_into(std::span<const double> s, std::span<double> out, double k,
                 double dt_step) {
  const std::size_t n = s.size();
  out[0] = s[0];
  out[n - 1] = s[n - 1];
  double moved = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // d_f looks back and d_b ahead; the update is symmetric in the two.
    const double d_f = s[i - 1] - s[i];
    const double d_b = s[i + 1] - s[i];
    const double delta = dt_step * (d_f * influence(d_f, k) + d_b * influence(d_b, k));
    out[i] = s[i] + delta;
    moved = std::max(moved, std::abs(delta));
  }
  return moved;
}

}  // namespace

std::vector<double> diffuse_step(std::span<const double> signal, double k,
                                 double dt_step) {
  std::vector<double> out(signal.begin(), signal.end());
  if (signal.size() >= 3) step_into(signal, out, k, dt_step);
  return out;
}

DiffusionResult diffuse_batch(std::span<const double> signal,
                              const PdeConfig& config) {
  DiffusionResult r;
  r.values.assign(signal.begin(), signal.end());
  if (signal.size() < 3) return r;
  std::vector<double> next(signal.size());
  while (r.iterations < config.max_iters) {
    const double moved = step_into(r.values, next, config.k, config.dt_step);
    r.values.swap(next);
    ++r.iterations;
    if (moved < config.conv_tol) break;
  }
  return r;
}

PdeStage::PdeStage(PdeConfig config)
    : WindowedStage(config.buffer - 2, 0, 1), config_(config) {
  config_.validate();
}

std::unique_ptr<FilterStage> PdeStage::clone() const {
  return std::make_unique<PdeStage>(config_);
}

Vec2 PdeStage::estimate(const StageWindow& w) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto* part : {&w.history, &w.ahead})
    for (const Vec2& v : *part) {
      xs.push_back(v.x);
      ys.push_back(v.y);
    }
  const std::size_t cur = w.history.size();
  return {diffuse_batch(xs, config_).values[cur], diffuse_batch(ys, config_).values[cur]};
}

}  // namespace touchsmooth
