#include <doctest.h>

#include "support.hpp"
#include "touchsmooth/evalbench.hpp"
#include "touchsmooth/pipeline.hpp"
#include "touchsmooth/window_filters.hpp"

using namespace touchsmooth;
using testing_support::ramp;

namespace {

Pipeline from_text(const std::string& text) { return Pipeline(parse_pipeline_spec(text)); }

}  // namespace

TEST_CASE("spec text parses and prints back") {
  const std::string text =
      "name = demo\nmax-delay = 6\nfeedback = k -> p\n"
      "# the PDE goes first\n[pde:p]\nbuffer = 8\n[kalman:k]\n[mma]\nn = 4\n"
      "[gate]\ntarget = p\nthreshold = 0.25\nwindow = 12\n";
  const PipelineSpec s = parse_pipeline_spec(text);
  CHECK(s.name == "demo");
  CHECK(s.max_delay == 6);
  REQUIRE(s.stages.size() == 3);
  CHECK(s.stages[0].kind == "pde");
  CHECK(s.stages[0].label == "p");
  CHECK(s.stages[0].params.at("buffer") == "8");
  CHECK(s.feedback.size() == 1);
  CHECK(s.gate->threshold == 0.25);
  const PipelineSpec again = parse_pipeline_spec(to_text(s));
  CHECK(to_text(again) == to_text(s));
  Pipeline p(s);
  CHECK(p.group_delay() == 5);
}

TEST_CASE("spec errors name the problem") {
  CHECK_THROWS_WITH(parse_pipeline_spec("bogus = 1\n"), "line 1: unknown key 'bogus'");
  CHECK_THROWS_WITH(parse_pipeline_spec("[mma\n"), "line 1: unterminated section header");
  CHECK_THROWS_WITH(parse_pipeline_spec("[mma]\nn = 1\nn = 2\n"), "line 3: duplicate key 'n'");
  CHECK_THROWS_WITH(from_text("[mma]\nwidth = 3\n"), "stage 'mma': unknown key 'width'");
  CHECK_THROWS_WITH(from_text("[blur]\n"), "stage 'blur': unknown stage kind 'blur'");
  CHECK_THROWS_WITH(from_text("[mma]\nn = x\n"), "stage 'mma' key 'n': 'x' is not an integer");
  CHECK_THROWS(from_text("[mma]\nn = 0\n"));
  CHECK_THROWS(from_text("feedback = mma -> pde\n[mma]\n"));
  CHECK_THROWS(from_text("feedback = pde -> ma\n[ma]\n[pde]\n"));
  CHECK_THROWS(from_text("max-delay = 4\n[mma]\nn = 5\n"));
  CHECK_THROWS(from_text("[mma]\n[mma]\n"));
  CHECK_THROWS(load_pipeline_spec("preset:nope"));
}

TEST_CASE("presets load and report their delays") {
  for (const auto& name : preset_names()) {
    Pipeline p(preset_spec(name));
    CHECK(p.group_delay() == 5);
    CHECK(load_pipeline_spec("preset:" + name).name == name);
  }
}

TEST_CASE("single stage pipeline matches the bare stage") {
  std::mt19937_64 rng(41);
  const Trace in = Trace::from_positions(testing_support::uniform2(rng, 100, -4, 4));
  Pipeline p(preset_spec("mma5"));
  MovingWindowStage bare({5, WindowMode::kModifiedAverage});
  CHECK(run(p, in).filtered.points == run_stage(bare, in).points);
}

TEST_CASE("SG on top of the moving average adds two frames") {
  for (int n = 1; n <= 6; ++n) {
    Pipeline p = from_text("[mma]\nn = " + std::to_string(n) + "\n[sg]\ntaps = 5\n");
    CHECK(p.group_delay() == n + 2);
  }
}

TEST_CASE("bypassing the PDE drops the delay by one") {
  Pipeline p(preset_spec("d"));
  CHECK(p.group_delay() == 5);
  p.set_bypassed("pde", true);
  CHECK(p.group_delay() == 4);
  CHECK(p.active_stages() == std::vector<std::string>{"kalman", "mma"});
  p.set_bypassed("pde", false);
  CHECK(p.group_delay() == 5);
}

TEST_CASE("the gate bypasses the PDE on clean input") {
  Pipeline p(preset_spec("three-stage-gated"));
  const FilterResult clean = run(p, ramp(100, {0.2, 0.1}));
  CHECK(clean.gate == GateDecision::kBypassed);
  CHECK(clean.group_delay == 4);
  const Trace truth = generate_truth(benchmark_drag(DragShape::kLinear, 25));
  const FilterResult noisy = run(p, add_noise(truth, benchmark_noise(), 0));
  CHECK(noisy.gate == GateDecision::kActive);
  CHECK(noisy.group_delay == 5);
}

TEST_CASE("noise gate decisions") {
  const auto line = ramp(16, {1.0, 2.0}).positions();
  CHECK(estimate_noise_sd(line) == doctest::Approx(0.0).scale(1.0));
  NoiseGate g;
  CHECK(noise_gate_decision(line, g) == GateDecision::kBypassed);
  g.threshold = 0.0;
  CHECK(noise_gate_decision(line, g) == GateDecision::kActive);
  const std::vector<Vec2> short_window(3);
  CHECK_THROWS(estimate_noise_sd(short_window));
}

TEST_CASE("gate estimate is unbiased on 16-frame windows") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> n(0.0, 1.0);
  const double sigma = 0.8;
  double sum = 0.0;
  const int windows = 40000;
  for (int k = 0; k < windows; ++k) {
    std::vector<Vec2> w;
    for (int i = 0; i < 16; ++i) w.push_back({0.3 * i + sigma * n(rng), -0.1 * i + sigma * n(rng)});
    sum += estimate_noise_sd(w);
  }
  CHECK(sum / windows == doctest::Approx(sigma).epsilon(0.01));
}

TEST_CASE("feedback routes the kalman output into the PDE history") {
  const Trace truth = generate_truth(benchmark_drag(DragShape::kLinear, 50));
  const Trace in = add_noise(truth, benchmark_noise(), 1);
  Pipeline with(preset_spec("d"));
  PipelineSpec plain = preset_spec("d");
  plain.feedback.clear();
  Pipeline without(plain);
  CHECK(run(with, in).filtered.points != run(without, in).filtered.points);
}

TEST_CASE("identical history gives identical output") {
  const Trace truth = generate_truth(benchmark_drag(DragShape::kNonlinear, 25));
  const Trace in = add_noise(truth, benchmark_noise(), 2);
  for (const auto& name : preset_names()) {
    Pipeline p(preset_spec(name));
    auto fresh = p.clone();
    std::vector<std::optional<TracePoint>> first;
    for (std::size_t i = 0; i < 140; ++i) first.push_back(p.push(in[i]));
    p.reset();
    for (std::size_t i = 0; i < 140; ++i) {
      const auto again = p.push(in[i]);
      const auto other = fresh->push(in[i]);
      REQUIRE(again == first[i]);
      REQUIRE(other == first[i]);
    }
  }
}

TEST_CASE("short traces flush out completely") {
  Pipeline p(preset_spec("three-stage"));
  const FilterResult r = run(p, ramp(3, {1, 0}));
  CHECK(r.filtered.size() == 3);
  const Trace shown = emission_view(r.filtered, r.group_delay);
  CHECK_THROWS_WITH(align_for_metric(ramp(3, {1, 0}), shown, r.group_delay),
                    "trace too short for delay");
}

TEST_CASE("published pipelines beat the noisy input") {
  const NoiseSpec noise = benchmark_noise(5, 100);
  std::vector<PipelineSpec> specs;
  for (const auto& name : preset_names()) specs.push_back(preset_spec(name));
  const BenchReport r = run_row(benchmark_drag(DragShape::kLinear, 10), {noise, specs, 0});
  for (const auto& f : r.filtered) {
    INFO(f.preset);
    CHECK(f.mse < r.noisy_mse);
  }
}

TEST_CASE("emission view holds the first estimate") {
  const Trace est = ramp(6, {1, 0});
  const Trace v = emission_view(est, 2);
  REQUIRE(v.size() == 6);
  CHECK(v[0].x == 0.0);
  CHECK(v[1].x == 0.0);
  CHECK(v[2].x == 0.0);
  CHECK(v[5].x == 3.0);
}
