#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"
#include "touchsmooth/evalbench.hpp"
#include "touchsmooth/model_filters.hpp"

using namespace touchsmooth;

namespace {

double brute_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double all_pairs_slope(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> s;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (t[i] != t[j]) s.push_back((v[j] - v[i]) / (t[j] - t[i]));
  return brute_median(s);
}

std::vector<TracePoint> window_of(const std::vector<double>& values, std::int64_t first = 0) {
  std::vector<TracePoint> w;
  for (std::size_t i = 0; i < values.size(); ++i)
    w.push_back({first + static_cast<std::int64_t>(i), values[i], values[i]});
  return w;
}

}  // namespace

TEST_CASE("kde degenerate and symmetric windows") {
  KdeConfig c;
  const std::vector<double> flat(5, 7.0);
  const KdeTrace r = kde_iterate(flat, c);
  CHECK(r.iterations == 0);
  CHECK(kde_smooth(flat, c) == 7.0);
  const std::vector<double> sym{-1, 0, 1};
  CHECK(std::abs(kde_smooth(sym, c)) < 1e-12);
  c.bandwidth_rule = BandwidthRule::kFixed;
  c.fixed_bandwidth = 0.3;
  CHECK(std::abs(kde_smooth(sym, c)) < 1e-12);
}

TEST_CASE("kde matches the fixed-point oracle") {
  // Independent iteration of the weighted-mean map with h fixed at the
  // window's sample SD: five passes, every point at 1.2121578870816456.
  const std::vector<double> w{0, 0, 10, 0, 0};
  const KdeTrace r = kde_iterate(w, KdeConfig{});
  CHECK(r.iterations == 5);
  CHECK(r.values[2] == doctest::Approx(1.2121578870816456).epsilon(1e-12));
  CHECK(r.values[2] < 10.0);
}

TEST_CASE("kde window SD never grows") {
  std::mt19937_64 rng(11);
  KdeConfig c;
  c.max_iters = 200;
  c.sd_tol = 0.0;
  c.move_tol = 1e-12;
  for (int k = 0; k < 500; ++k) {
    const auto w = testing_support::uniform(rng, 5 + 2 * (k % 4), -20, 20);
    const KdeTrace r = kde_iterate(w, c);
    for (std::size_t i = 1; i < r.sd_per_iteration.size(); ++i)
      REQUIRE(r.sd_per_iteration[i] <= r.sd_per_iteration[i - 1] + 1e-12);
  }
}

TEST_CASE("least squares examples and residual orthogonality") {
  const std::vector<double> t{0, 1, 2, 3, 4};
  std::vector<double> v;
  for (double x : t) v.push_back(2 * x + 1);
  const LineFit f = fit_least_squares(t, v);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));

  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    const auto tt = testing_support::uniform(rng, 11, -5, 5);
    const auto vv = testing_support::uniform(rng, 11, -50, 50);
    const LineFit g = fit_least_squares(tt, vv);
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) {
      const double r = vv[i] - g.at(tt[i]);
      s0 += r;
      s1 += tt[i] * r;
    }
    CHECK(std::abs(s0) < 1e-9);
    CHECK(std::abs(s1) < 1e-9);
  }
}

TEST_CASE("degenerate fits fall back to the mean") {
  const std::vector<double> t{3, 3, 3};
  const std::vector<double> v{1, 2, 6};
  CHECK(fit_least_squares(t, v).at(3) == doctest::Approx(3.0));
  CHECK(fit_theil_sen(t, v).at(3) == doctest::Approx(3.0));
}

TEST_CASE("regression with variant-C removal drops the outlier") {
  const auto w = window_of({0, 1, 2, 300});
  RegressionConfig c;
  c.odd_removal = OddRemoval::kVariantC;
  const Vec2 out = windowed_regression(w, 3, c, Vec2{2, 2});
  CHECK(out.x == doctest::Approx(3.0));
  CHECK(out.y == doctest::Approx(3.0));
  c.odd_removal = OddRemoval::kNone;
  CHECK(windowed_regression(w, 3, c).x > 100.0);
}

TEST_CASE("regression fits each axis against frame index") {
  std::vector<TracePoint> w;
  for (int f = 10; f < 21; ++f) w.push_back({f, 2.0 * f + 1, -0.5 * f});
  RegressionConfig c;
  const Vec2 out = windowed_regression(w, 17, c);
  CHECK(out.x == doctest::Approx(35.0));
  CHECK(out.y == doctest::Approx(-8.5));
}

TEST_CASE("theil-sen against the all-pairs median") {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> v{0, 1, 2, 100};
  const LineFit f = fit_theil_sen(t, v);
  CHECK(f.slope == doctest::Approx(all_pairs_slope(t, v)));
  // Slopes {1, 1, 1, 100/3, 49.5, 98}: the middle pair averages to 103/6.
  CHECK(f.slope == doctest::Approx(103.0 / 6));

  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    const int n = 3 + k % 9;
    std::vector<double> tt(n);
    for (int i = 0; i < n; ++i) tt[i] = i;
    const auto vv = testing_support::uniform(rng, n, -10, 10);
    const LineFit g = fit_theil_sen(tt, vv);
    REQUIRE(g.slope == doctest::Approx(all_pairs_slope(tt, vv)).epsilon(1e-12));
    std::vector<double> resid;
    for (int i = 0; i < n; ++i) resid.push_back(vv[i] - g.slope * tt[i]);
    REQUIRE(g.intercept == doctest::Approx(brute_median(resid)).epsilon(1e-12));
  }
}

TEST_CASE("theil-sen slope survives one outlier on a line") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> wild(-1e4, 1e4);
  for (int k = 0; k < 300; ++k) {
    const int n = 5 + k % 6;
    std::vector<double> t(n);
    std::vector<double> v(n);
    const double slope = wild(rng) / 1e3;
    for (int i = 0; i < n; ++i) {
      t[i] = i;
      v[i] = slope * i + 3.0;
    }
    v[static_cast<std::size_t>(k % n)] = wild(rng);
    CHECK(fit_theil_sen(t, v).slope == doctest::Approx(slope).epsilon(1e-9));
  }
}

TEST_CASE("regression stage delay equals its lookahead") {
  RegressionStage s(RegressionConfig{7, 3, RegressionMethod::kTheilSen, OddRemoval::kNone});
  CHECK(s.group_delay() == 3);
  const Trace line = testing_support::ramp(60, {0.3, 0.1});
  const Trace est = run_stage(s, line);
  for (std::size_t i = 0; i < est.size(); ++i) CHECK(norm(est[i].pos() - line[i].pos()) < 1e-9);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(3 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
}

TEST_CASE("polar smoothing of a straight drag stays on the line") {
  const Trace line = testing_support::ramp(120, {0.3, 0.4});
  PolarConfig c;
  const PolarResult r = polar_smooth_detailed(line, c);
  for (std::size_t i = 1; i < r.smoothed_theta.size(); ++i)
    CHECK(r.smoothed_theta[i] == doctest::Approx(std::atan2(0.4, 0.3)));
  for (const auto& p : r.smoothed.points) CHECK(std::abs(p.x * 0.4 - p.y * 0.3) < 1e-9);
}

TEST_CASE("alpha one leaves theta untouched") {
  std::mt19937_64 rng(15);
  const Trace in = Trace::from_positions(testing_support::uniform2(rng, 50, 1, 10));
  PolarConfig c;
  c.alpha = 1.0;
  const PolarResult r = polar_smooth_detailed(in, c);
  const auto raw = shift_origin_polar(in);
  for (std::size_t i = 1; i < raw.size(); ++i)
    CHECK(wrap_angle(r.smoothed_theta[i] - raw[i].theta) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("theta is unwrapped across the branch cut") {
  std::vector<Vec2> circle{{0, 0}};
  for (int i = 0; i < 300; ++i) {
    const double a = 0.05 * i;
    circle.push_back({10 * std::cos(a) - 20, 10 * std::sin(a)});
  }
  const PolarResult r = polar_smooth_detailed(Trace::from_positions(circle), PolarConfig{});
  for (std::size_t i = 1; i < r.smoothed_theta.size(); ++i)
    CHECK(std::abs(r.smoothed_theta[i] - r.smoothed_theta[i - 1]) <= std::numbers::pi);
}

TEST_CASE("polar smoothing beats the noisy straight drag") {
  const Trace truth = generate_truth(benchmark_drag(DragShape::kLinear, 25.0));
  const NoiseSpec noise = benchmark_noise(3, 100);
  PolarConfig c;
  double noisy = 0.0;
  double smoothed = 0.0;
  for (int j = 0; j < noise.trials; ++j) {
    const Trace n = add_noise(truth, noise, j);
    const Trace est = polar_smooth(n, c);
    const auto [ref, out] = align_for_metric(truth, est, 0);
    noisy += measure1(truth, n);
    smoothed += measure1(ref, out);
  }
  CHECK(smoothed < noisy);
}

TEST_CASE("model filter configuration errors") {
  CHECK_THROWS(KdeConfig{0}.validate());
  CHECK_THROWS(PolarConfig{{5, WindowMode::kPlainAverage}, 0.3}.validate());
  CHECK_THROWS(PolarConfig{{5, WindowMode::kModifiedAverage}, 0.0}.validate());
  CHECK_THROWS(PolarConfig{{5, WindowMode::kModifiedAverage}, 1.5}.validate());
}
