#include "touchsmooth/evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

namespace touchsmooth {

const PresetResult& BenchReport::result(const std::string& preset) const {
  for (const auto& r : filtered)
    if (r.preset == preset) return r;
  throw Error("report has no preset '" + preset + "'");
}

namespace {

struct TrialOutcome {
  double noisy_m1 = 0.0;
  double noisy_max = 0.0;
  std::vector<double> m1;
  std::vector<double> max;
  std::vector<double> ms;
};

int worker_count(int requested, int trials) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, trials);
}

}  // namespace

BenchReport run_row(const DragSpec& drag, const BenchOptions& options) {
  options.noise.validate();
  const Trace truth = generate_truth(drag);
  const int trials = options.noise.trials;
  const std::size_t np = options.pipelines.size();
  // Build once up front so spec errors surface before any thread starts.
  for (const auto& spec : options.pipelines) Pipeline probe(spec);

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      std::vector<std::unique_ptr<Pipeline>> pipes;
      for (const auto& spec : options.pipelines) pipes.push_back(std::make_unique<Pipeline>(spec));
      for (int j = next++; j < trials && !failed; j = next++) {
        TrialOutcome& o = outcomes[static_cast<std::size_t>(j)];
        const Trace noisy = add_noise(truth, options.noise, j);
        o.noisy_m1 = measure1(truth, noisy);
        o.noisy_max = max_error(truth, noisy);
        for (std::size_t p = 0; p < np; ++p) {
          const auto t0 = std::chrono::steady_clock::now();
          const FilterResult fr = run(*pipes[p], noisy);
          const auto t1 = std::chrono::steady_clock::now();
          const Trace shown = emission_view(fr.filtered, fr.group_delay);
          const auto [ref, est] = align_for_metric(truth, shown, fr.group_delay);
          o.m1.push_back(measure1(ref, est));
          o.max.push_back(max_error(ref, est));
          o.ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  const int workers = worker_count(options.threads, trials);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BenchReport r;
  r.shape = drag.shape;
  r.velocity = drag.velocity;
  r.acceleration = drag.acceleration;
  r.trials = trials;
  r.frames = truth.size();
  for (const auto& o : outcomes) {
    r.noisy_mse += o.noisy_m1;
    r.noisy_max = std::max(r.noisy_max, o.noisy_max);
  }
  r.noisy_mse /= trials;
  for (std::size_t p = 0; p < np; ++p) {
    PresetResult pr;
    pr.preset = options.pipelines[p].name;
    pr.group_delay = Pipeline(options.pipelines[p]).group_delay();
    for (const auto& o : outcomes) {
      pr.per_trial.push_back(o.m1[p]);
      pr.mse += o.m1[p];
      pr.max = std::max(pr.max, o.max[p]);
      pr.wall_ms += o.ms[p];
    }
    pr.mse /= trials;
    pr.wall_ms /= trials;
    r.filtered.push_back(std::move(pr));
  }
  return r;
}

std::vector<BenchReport> run_table(const DragSpec& base, const std::vector<GridRow>& grid,
                                   const BenchOptions& options) {
  std::vector<BenchReport> out;
  for (const auto& row : grid) {
    DragSpec d = base;
    d.velocity = row.velocity;
    d.acceleration = row.acceleration;
    out.push_back(run_row(d, options));
  }
  return out;
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "velocity") return SweepAxis::kVelocity;
  if (s == "acceleration") return SweepAxis::kAcceleration;
  throw Error("sweep axis must be velocity or acceleration");
}

std::vector<BenchReport> sweep(SweepAxis axis, const DragSpec& base,
                               const std::vector<double>& values,
                               const BenchOptions& options) {
  std::vector<GridRow> grid;
  for (double v : values)
    grid.push_back(axis == SweepAxis::kVelocity ? GridRow{v, base.acceleration}
                                                : GridRow{base.velocity, v});
  return run_table(base, grid, options);
}

DragSpec benchmark_drag(DragShape shape, double velocity, double acceleration) {
  DragSpec d;
  d.shape = shape;
  d.velocity = velocity;
  d.acceleration = acceleration;
  // Every row lasts 480 frames; the shape is laid out over the path covered.
  d.duration = 8.0;
  return d;
}

NoiseSpec benchmark_noise(std::uint64_t seed, int trials) {
  NoiseSpec n;
  // calibrate_noise(1.35, linear v=25, ratio 2, seed 1, 100 trials) lands here.
  n.sigma_along = 0.69921875;
  n.sigma_perp = kBenchmarkNoiseRatio * n.sigma_along;
  n.seed = seed;
  n.trials = trials;
  return n;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string> preset_columns(const std::vector<BenchReport>& rows) {
  std::vector<std::string> out;
  if (!rows.empty())
    for (const auto& f : rows.front().filtered) out.push_back(f.preset);
  return out;
}

}  // namespace

std::string format_markdown(const std::vector<BenchReport>& rows, bool with_timing) {
  std::ostringstream o;
  const auto presets = preset_columns(rows);
  o << "| shape | velocity (mm/s) | acceleration (mm/s^2) | noisy MSE | noisy max";
  for (const auto& p : presets) {
    o << " | " << p << " MSE | " << p << " max";
    if (with_timing) o << " | " << p << " ms";
  }
  o << " |\n|---|---|---|---|---";
  for (std::size_t i = 0; i < presets.size() * (with_timing ? 3 : 2); ++i) o << "|---";
  o << "|\n";
  for (const auto& r : rows) {
    o << "| " << to_string(r.shape) << " | " << shortest(r.velocity) << " | "
      << shortest(r.acceleration) << " | " << fixed2(r.noisy_mse) << " | "
      << fixed2(r.noisy_max);
    for (const auto& p : presets) {
      const auto& f = r.result(p);
      o << " | " << fixed2(f.mse) << " | " << fixed2(f.max);
      if (with_timing) o << " | " << fixed2(f.wall_ms);
    }
    o << " |\n";
  }
  return o.str();
}

std::string format_csv(const std::vector<BenchReport>& rows, bool with_timing) {
  std::ostringstream o;
  o << "shape,velocity,acceleration,trials,frames,preset,group_delay,mse,max";
  if (with_timing) o << ",wall_ms";
  o << '\n';
  for (const auto& r : rows) {
    const std::string head = std::string(to_string(r.shape)) + ',' + shortest(r.velocity) +
                             ',' + shortest(r.acceleration) + ',' +
                             std::to_string(r.trials) + ',' + std::to_string(r.frames) + ',';
    o << head << "noisy,0," << shortest(r.noisy_mse) << ',' << shortest(r.noisy_max);
    if (with_timing) o << ",0";
    o << '\n';
    for (const auto& f : r.filtered) {
      o << head << f.preset << ',' << f.group_delay << ',' << shortest(f.mse) << ','
        << shortest(f.max);
      if (with_timing) o << ',' << shortest(f.wall_ms);
      o << '\n';
    }
  }
  return o.str();
}

std::string format_sweep_csv(SweepAxis axis, const std::vector<BenchReport>& rows) {
  std::ostringstream o;
  o << (axis == SweepAxis::kVelocity ? "velocity" : "acceleration") << ",series,mse,max\n";
  for (const auto& r : rows) {
    const double x = axis == SweepAxis::kVelocity ? r.velocity : r.acceleration;
    o << shortest(x) << ",noisy," << shortest(r.noisy_mse) << ',' << shortest(r.noisy_max)
      << '\n';
    for (const auto& f : r.filtered)
      o << shortest(x) << ',' << f.preset << ',' << shortest(f.mse) << ',' << shortest(f.max)
        << '\n';
  }
  return o.str();
}

double mean_mse(const std::vector<BenchReport>& rows, const std::string& preset) {
  if (rows.empty()) throw Error("no rows");
  double s = 0.0;
  for (const auto& r : rows) s += r.result(preset).mse;
  return s / static_cast<double>(rows.size());
}

double mean_noisy_mse(const std::vector<BenchReport>& rows) {
  if (rows.empty()) throw Error("no rows");
  double s = 0.0;
  for (const auto& r : rows) s += r.noisy_mse;
  return s / static_cast<double>(rows.size());
}

}  // namespace touchsmooth
