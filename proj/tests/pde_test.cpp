#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "touchsmooth/pde.hpp"

using namespace touchsmooth;

namespace {

double total_variation(const std::vector<double>& v) {
  double tv = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
  return tv;
}

}  // namespace

TEST_CASE("diffusion step examples") {
  const std::vector<double> flat{3, 3, 3};
  CHECK(diffuse_step(flat, 100, 0.25) == flat);
  const std::vector<double> bump{0, 4, 0};
  const auto s = diffuse_step(bump, 100, 0.25);
  CHECK(std::abs(s[1] - 2.003195) < 1e-6);
  CHECK(s[0] == 0.0);
  CHECK(s[2] == 0.0);
  const std::vector<double> line{0, 1, 2, 3, 4};
  CHECK(diffuse_step(line, 100, 0.25) == line);
  CHECK(influence(4, 100) == doctest::Approx(1.0 / 1.0016));
}

TEST_CASE("batch diffusion converges") {
  const std::vector<double> flat{3, 3, 3, 3};
  const auto f = diffuse_batch(flat, PdeConfig{});
  CHECK(f.iterations == 1);
  CHECK(f.values == flat);

  const std::vector<double> bump{0, 4, 0};
  const auto b = diffuse_batch(bump, PdeConfig{});
  CHECK(std::abs(b.values[1]) < 1e-5);
  CHECK(b.iterations < 1000);
}

TEST_CASE("total variation and the maximum principle hold every step") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 1000; ++k) {
    auto v = testing_support::uniform(rng, 3 + k % 30, -200, 200);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mn = *lo;
    const double mx = *hi;
    for (int it = 0; it < 20; ++it) {
      const auto n = diffuse_step(v, 100, 0.25);
      REQUIRE(total_variation(n) <= total_variation(v) + 1e-9);
      for (double x : n) REQUIRE((x >= mn - 1e-12 && x <= mx + 1e-12));
      v = n;
    }
  }
}

TEST_CASE("streaming PDE keeps constants and lines") {
  PdeStage s(PdeConfig{});
  CHECK(s.group_delay() == 1);
  const Trace flat = Trace::from_positions(std::vector<Vec2>(40, {1, 2}));
  for (const auto& p : run_stage(s, flat).points) CHECK(p.pos() == Vec2{1, 2});
  const Trace line = testing_support::ramp(100, {0.7, -0.2});
  const Trace est = run_stage(s, line);
  for (std::size_t i = 0; i < est.size(); ++i) CHECK(norm(est[i].pos() - line[i].pos()) < 1e-6);
}

TEST_CASE("streaming agrees with batch on the buffer window") {
  std::mt19937_64 rng(32);
  PdeConfig c;
  c.buffer = 8;
  PdeStage s(c);
  const Trace in = Trace::from_positions(testing_support::uniform2(rng, 40, -3, 3));
  const Trace est = run_stage(s, in);
  const std::size_t h = 6;
  for (std::size_t t = h; t + 1 < in.size(); ++t) {
    std::vector<double> xs;
    for (std::size_t i = t - h; i < t; ++i) xs.push_back(est[i].x);
    xs.push_back(in[t].x);
    xs.push_back(in[t + 1].x);
    CHECK(est[t].x == doctest::Approx(diffuse_batch(xs, c).values[h]).epsilon(1e-12));
  }
}

TEST_CASE("pde configuration errors") {
  PdeConfig c;
  c.dt_step = 0.6;
  CHECK_THROWS(c.validate());
  c = {};
  c.buffer = 2;
  CHECK_THROWS(c.validate());
}
