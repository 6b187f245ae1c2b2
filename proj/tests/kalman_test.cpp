#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "touchsmooth/kalman.hpp"

using namespace touchsmooth;

namespace {

bool symmetric_psd(const Matrix6d& p, double tol = 1e-9) {
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(p);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

TEST_CASE("transition examples") {
  const Matrix6d a = build_transition(1.0);
  Vector6d s;
  s << 0, 0, 1, 0, 0, 0;
  Vector6d n = a * s;
  CHECK(n(0) == 1.0);
  CHECK(n(1) == 0.0);
  s << 0, 0, 0, 0, 2, 0;
  n = a * s;
  CHECK(n(0) == 1.0);
  CHECK(n(2) == 2.0);
  CHECK((a * Vector6d::Zero()).isZero());
}

TEST_CASE("process noise closed form") {
  CHECK(build_process_noise(0.0, 1.0).isZero());
  const Matrix6d q = build_process_noise(1.0, 1.0);
  CHECK(q(0, 0) == doctest::Approx(0.05));
  CHECK(q(1, 1) == doctest::Approx(0.05));
  CHECK(q(0, 2) == doctest::Approx(1.0 / 8));
  CHECK(q(4, 4) == doctest::Approx(1.0));
  CHECK(q(0, 1) == 0.0);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const Matrix6d m = build_process_noise(u(rng), u(rng) + 1e-3);
    const Matrix6d jittered = m + 1e-12 * Matrix6d::Identity();
    CHECK(jittered.llt().info() == Eigen::Success);
    CHECK(symmetric_psd(m));
  }
}

TEST_CASE("observation matrix picks positions") {
  const auto h = observation_matrix();
  Vector6d s;
  s << 3, 4, 5, 6, 7, 8;
  CHECK((h * s) == Eigen::Vector2d(3, 4));
}

TEST_CASE("noiseless stationary measurements pass straight through") {
  KalmanStage k(KalmanConfig{});
  const Trace flat = Trace::from_positions(std::vector<Vec2>(100, {4.0, -2.0}));
  for (const auto& p : run_stage(k, flat).points) {
    CHECK(std::abs(p.x - 4.0) < 1e-6);
    CHECK(std::abs(p.y + 2.0) < 1e-6);
  }
}

TEST_CASE("noiseless ramp is tracked after burn-in") {
  KalmanStage k(KalmanConfig{});
  CHECK(k.group_delay() == 0);
  const Trace line = testing_support::ramp(200, {1.0, 0.0});
  const Trace est = run_stage(k, line);
  for (std::size_t i = 50; i < est.size(); ++i) CHECK(std::abs(est[i].x - line[i].x) < 0.01);
}

TEST_CASE("huge process noise makes the filter follow the measurement") {
  KalmanConfig c;
  c.q_coeff = 1e12;
  std::mt19937_64 rng(22);
  KalmanState s;
  std::vector<Vec2> trail = testing_support::uniform2(rng, 10, -1, 1);
  for (int i = 0; i < 30; ++i) {
    const Vec2 z = testing_support::uniform2(rng, 1, -50, 50)[0];
    const auto r = kalman_step(s, {i, z.x, z.y}, trail, c);
    s = r.state;
    CHECK(r.output.point.x == doctest::Approx(z.x).epsilon(1e-6));
    CHECK(r.output.point.y == doctest::Approx(z.y).epsilon(1e-6));
    CHECK(r.output.group_delay == 0);
  }
}

TEST_CASE("zero stream keeps a zero state") {
  KalmanConfig c;
  KalmanState s;
  const std::vector<Vec2> trail(10, {0, 0});
  for (int i = 0; i < 50; ++i) s = kalman_step(s, {i, 0, 0}, trail, c).state;
  CHECK(s.x.isZero());
}

TEST_CASE("covariance stays symmetric PSD over random steps") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dt(1e-3, 2.0);
  std::uniform_real_distribution<double> scale(1.0, 1e6);
  KalmanConfig c;
  c.dt = dt(rng);
  c.scale_fact = scale(rng);
  KalmanState s;
  std::vector<Vec2> trail;
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    if (i % 500 == 0) {
      c.dt = dt(rng);
      c.scale_fact = scale(rng);
      s = KalmanState{};
      trail.clear();
    }
    const Vec2 z = testing_support::uniform2(rng, 1, -100, 100)[0];
    s = kalman_step(s, {i, z.x, z.y}, trail, c).state;
    trail.push_back(z);
    if (trail.size() > 10) trail.erase(trail.begin());
    if (!symmetric_psd(s.P) || !s.x.allFinite()) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("trailing SD is floored") {
  const std::vector<Vec2> one{{1, 1}};
  CHECK(trailing_sd(one, 1e-6) == Vec2{1e-6, 1e-6});
  const std::vector<Vec2> two{{0, 0}, {2, 0}};
  const Vec2 sd = trailing_sd(two, 1e-6);
  CHECK(sd.x == doctest::Approx(std::sqrt(2.0)));
  CHECK(sd.y == 1e-6);
}

TEST_CASE("kalman configuration errors") {
  KalmanConfig c;
  c.dt = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.noise_window = 1;
  CHECK_THROWS(c.validate());
}
