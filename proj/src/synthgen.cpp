#include "touchsmooth/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "touchsmooth/metrics.hpp"

namespace touchsmooth {

const char* to_string(DragShape s) {
  switch (s) {
    case DragShape::kLinear:
      return "linear";
    case DragShape::kNonlinear:
      return "nonlinear";
    case DragShape::kZigzag:
      return "zigzag";
  }
  return "?";
}

DragShape parse_shape(const std::string& s) {
  if (s == "linear") return DragShape::kLinear;
  if (s == "nonlinear" || s == "arc") return DragShape::kNonlinear;
  if (s == "zigzag") return DragShape::kZigzag;
  throw Error("unknown shape '" + s + "' (linear, nonlinear, zigzag)");
}

namespace {

// Time at which the path reaches the extent, or nothing if the drag stops
// first.
std::optional<double> time_to_cover(double v, double a, double extent) {
  if (a == 0.0) return extent / v;
  const double disc = v * v + 2.0 * a * extent;
  if (disc <= 0.0) return std::nullopt;
  const double t = (-v + std::sqrt(disc)) / a;
  if (v + a * t <= 0.0) return std::nullopt;
  return t;
}

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

void DragSpec::validate() const {
  if (!(velocity > 0.0)) throw Error("drag velocity must be positive");
  if (!(frame_rate > 0.0)) throw Error("frame rate must be positive");
  if (!std::isfinite(acceleration)) throw Error("acceleration must be finite");
  if (params.zigzag_segments < 1) throw Error("zigzag needs at least one segment");
  if (duration) {
    if (!(*duration > 0.0)) throw Error("drag duration must be positive");
    if (velocity + acceleration * *duration <= 0.0)
      throw Error("drag speed reaches zero before the drag ends");
  } else {
    if (!(extent > 0.0)) throw Error("drag extent must be positive");
    if (!time_to_cover(velocity, acceleration, extent))
      throw Error("drag speed reaches zero before the extent is covered");
  }
}

double path_length(const DragSpec& spec, double t) {
  return spec.velocity * t + 0.5 * spec.acceleration * t * t;
}

std::size_t frame_count(const DragSpec& spec) {
  spec.validate();
  const double t_end = spec.duration ? *spec.duration
                                     : *time_to_cover(spec.velocity, spec.acceleration,
                                                      spec.extent);
  return static_cast<std::size_t>(std::floor(t_end * spec.frame_rate + 1e-9)) + 1;
}

std::pair<Vec2, Vec2> path_point(const DragSpec& spec, double s, double total) {
  const ShapeParams& p = spec.params;
  switch (spec.shape) {
    case DragShape::kLinear: {
      const Vec2 u = unit(p.heading);
      return {spec.start + s * u, u};
    }
    case DragShape::kNonlinear: {
      if (p.arc_turn == 0.0) {
        const Vec2 u = unit(p.heading);
        return {spec.start + s * u, u};
      }
      // Constant curvature, turning left by arc_turn over the whole path.
      const double radius = total / p.arc_turn;
      const double phi = s / radius;
      const Vec2 local{radius * std::sin(phi), radius * (1.0 - std::cos(phi))};
      const double c = std::cos(p.heading);
      const double sn = std::sin(p.heading);
      return {spec.start + Vec2{c * local.x - sn * local.y, sn * local.x + c * local.y},
              unit(p.heading + phi)};
    }
    case DragShape::kZigzag: {
      const double seg = total / p.zigzag_segments;
      Vec2 at = spec.start;
      double left = s;
      for (int i = 0;; ++i) {
        const double dir = p.heading + (i % 2 == 0 ? 0.5 : -0.5) * p.zigzag_turn;
        const Vec2 u = unit(dir);
        if (left <= seg || i + 1 >= p.zigzag_segments) return {at + left * u, u};
        at = at + seg * u;
        left -= seg;
      }
    }
  }
  throw Error("unknown shape");
}

Trace generate_truth(const DragSpec& spec) {
  const std::size_t n = frame_count(spec);
  const double total = spec.duration ? path_length(spec, *spec.duration) : spec.extent;
  Trace out;
  out.frame_rate = spec.frame_rate;
  out.role = TraceRole::kGroundTruth;
  out.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / spec.frame_rate;
    const Vec2 p = path_point(spec, path_length(spec, t), total).first;
    out.points.push_back({static_cast<std::int64_t>(k), p.x, p.y});
  }
  return out;
}

void NoiseSpec::validate() const {
  if (!(sigma_along >= 0.0) || !(sigma_perp >= sigma_along))
    throw Error("noise needs sigma_perp >= sigma_along >= 0");
  if (trials < 1) throw Error("trials must be >= 1");
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  // splitmix64 over the (seed, trial) pair.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t a = mix(seed);
  const std::uint64_t b = mix(a ^ mix(trial + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Vec2> trace_tangents(const Trace& truth) {
  if (truth.size() < 2) throw Error("tangents need at least two points");
  const std::size_t n = truth.size();
  std::vector<Vec2> out(n);
  Vec2 last{1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = truth[std::min(i + 1, n - 1)].pos() - truth[i == 0 ? 0 : i - 1].pos();
    const double len = norm(d);
    if (len > 0.0) last = (1.0 / len) * d;
    out[i] = last;
  }
  return out;
}

Trace add_noise(const Trace& truth, const NoiseSpec& spec, int trial) {
  spec.validate();
  const auto tangents = trace_tangents(truth);
  auto eng = trial_engine(spec.seed, static_cast<std::uint64_t>(trial));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Trace out = truth;
  out.role = TraceRole::kNoisy;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double along = spec.sigma_along * gauss(eng);
    const double perp = spec.sigma_perp * gauss(eng);
    const Vec2 t = tangents[i];
    const Vec2 nrm{-t.y, t.x};
    out.points[i].x += along * t.x + perp * nrm.x;
    out.points[i].y += along * t.y + perp * nrm.y;
  }
  return out;
}

double noisy_measure1(const Trace& truth, const NoiseSpec& spec) {
  double sum = 0.0;
  for (int j = 0; j < spec.trials; ++j) sum += measure1(truth, add_noise(truth, spec, j));
  return sum / spec.trials;
}

CalibrationResult calibrate_noise(double target, const DragSpec& drag, double ratio,
                                  std::uint64_t seed, int trials, double rel_tol) {
  if (!(target >= 0.0)) throw Error("calibration target must be >= 0");
  if (!(ratio >= 1.0)) throw Error("perp/along ratio must be >= 1");
  CalibrationResult r;
  r.noise.seed = seed;
  r.noise.trials = trials;
  if (target == 0.0) return r;

  const Trace truth = generate_truth(drag);
  auto at = [&](double s) {
    NoiseSpec n{ratio * s, s, seed, trials};
    return noisy_measure1(truth, n);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (at(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error("calibration target is not bracketed");
  }
  for (r.steps = 1; r.steps <= 200; ++r.steps) {
    const double mid = 0.5 * (lo + hi);
    const double m = at(mid);
    if (std::abs(m - target) <= rel_tol * target) {
      r.noise.sigma_along = mid;
      r.noise.sigma_perp = ratio * mid;
      r.achieved = m;
      return r;
    }
    (m < target ? lo : hi) = mid;
  }
  throw Error("calibration did not converge");
}

std::vector<GridRow> table_grid() {
  return {{10, 0},   {25, 0},   {50, 0},   {100, 0},  {150, 0},  {200, 0},
          {25, 25},  {25, 50},  {25, 100}, {100, 25}, {100, 50}, {100, 100}};
}

std::vector<GridRow> read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "velocity,acceleration")
    throw Error(path + ": expected header 'velocity,acceleration'");
  std::vector<GridRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    GridRow r{};
    char comma = 0;
    if (!(ls >> r.velocity >> comma >> r.acceleration) || comma != ',')
      throw Error(path + ": bad row '" + line + "'");
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(path + ": no rows");
  return rows;
}

}  // namespace touchsmooth
