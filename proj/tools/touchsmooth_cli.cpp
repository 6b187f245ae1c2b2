// Command line front end: trace generation, filtering, benchmark tables,
// sweeps and noise calibration.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "touchsmooth/evalbench.hpp"

namespace fs = std::filesystem;
using namespace touchsmooth;

namespace {

struct Common {
  std::string shape = "linear";
  std::vector<std::string> presets;
  std::vector<std::string> specs;
  std::uint64_t seed = 1;
  int trials = 100;
  std::string out;
  std::string format = "md";
  int threads = 0;
  bool timing = false;
};

void add_pipeline_flags(CLI::App* app, Common& c) {
  app->add_option("--preset", c.presets, "pipeline preset(s): " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  app->add_option("--spec", c.specs, "pipeline spec file(s)")->check(CLI::ExistingFile);
}

std::vector<PipelineSpec> pipelines(const Common& c, std::vector<std::string> fallback) {
  std::vector<PipelineSpec> out;
  const auto& names = c.presets.empty() && c.specs.empty() ? fallback : c.presets;
  for (const auto& p : names) out.push_back(load_pipeline_spec("preset:" + p));
  for (const auto& s : c.specs) out.push_back(load_pipeline_spec(s));
  return out;
}

void emit(const Common& c, const std::string& file, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / file;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  std::cerr << "wrote " << path.string() << '\n';
}

std::vector<DragShape> shapes_of(const std::string& s) {
  if (s == "all") return {DragShape::kLinear, DragShape::kNonlinear, DragShape::kZigzag};
  return {parse_shape(s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"touch trace smoothing filters and benchmark"};
  app.require_subcommand(1);
  Common c;

  // gen
  auto* gen = app.add_subcommand("gen", "write a ground-truth drag and noisy copies as CSV");
  double velocity = 10.0;
  double acceleration = 0.0;
  double sigma_along = benchmark_noise().sigma_along;
  double sigma_perp = benchmark_noise().sigma_perp;
  gen->add_option("--shape", c.shape, "linear, nonlinear or zigzag");
  gen->add_option("--velocity", velocity, "mm/s");
  gen->add_option("--acceleration", acceleration, "mm/s^2");
  gen->add_option("--sigma-along", sigma_along, "mm");
  gen->add_option("--sigma-perp", sigma_perp, "mm");
  gen->add_option("--seed", c.seed);
  gen->add_option("--trials", c.trials, "noisy copies to write")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", c.out, "output directory")->required();

  // filter
  auto* filter = app.add_subcommand("filter", "run a pipeline over a CSV trace");
  std::string input;
  double frame_rate = 60.0;
  filter->add_option("--in", input, "input CSV trace")->required()->check(CLI::ExistingFile);
  filter->add_option("--frame-rate", frame_rate, "frames per second");
  filter->add_option("--out", c.out, "output directory (stdout if omitted)");
  add_pipeline_flags(filter, c);

  // bench
  auto* bench = app.add_subcommand("bench", "run the twelve-row drag table");
  std::string grid_file;
  for (auto* sub : {bench}) {
    sub->add_option("--shape", c.shape, "linear, nonlinear, zigzag or all");
    sub->add_option("--grid", grid_file, "CSV with velocity,acceleration rows")
        ->check(CLI::ExistingFile);
  }

  // sweep
  auto* sw = app.add_subcommand("sweep", "error against velocity or acceleration");
  std::string axis = "velocity";
  std::vector<double> values;
  double fixed_velocity = 25.0;
  sw->add_option("--shape", c.shape, "linear, nonlinear or zigzag");
  sw->add_option("--axis", axis, "velocity or acceleration");
  sw->add_option("--values", values, "swept values");
  sw->add_option("--velocity", fixed_velocity, "velocity held during acceleration sweeps");

  for (auto* sub : {bench, sw}) {
    add_pipeline_flags(sub, c);
    sub->add_option("--seed", c.seed);
    sub->add_option("--trials", c.trials)->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output directory (stdout if omitted)");
    sub->add_option("--format", c.format)->check(CLI::IsMember({"csv", "md"}));
    sub->add_option("--threads", c.threads, "worker threads (0: all cores)");
    sub->add_flag("--timing", c.timing, "add per-trace filtering time");
  }

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "fit noise SDs to a target noisy Measure1");
  double target = 1.35;
  double ratio = kBenchmarkNoiseRatio;
  double cal_velocity = 25.0;
  cal->add_option("--target", target, "mm");
  cal->add_option("--ratio", ratio, "perp/along SD ratio");
  cal->add_option("--shape", c.shape);
  cal->add_option("--velocity", cal_velocity, "mm/s");
  cal->add_option("--seed", c.seed);
  cal->add_option("--trials", c.trials)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const DragSpec d = benchmark_drag(parse_shape(c.shape), velocity, acceleration);
      const Trace truth = generate_truth(d);
      emit(c, "truth.csv", to_csv(truth));
      const NoiseSpec n{sigma_perp, sigma_along, c.seed, std::max(c.trials, 1)};
      for (int j = 0; j < c.trials; ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "noisy_%03d.csv", j);
        emit(c, name, to_csv(add_noise(truth, n, j)));
      }
    } else if (filter->parsed()) {
      const auto specs = pipelines(c, {"three-stage"});
      if (specs.size() != 1) throw Error("filter takes exactly one --preset or --spec");
      Pipeline p(specs.front());
      const Trace noisy = read_csv_file(input, frame_rate);
      const FilterResult r = run(p, noisy);
      std::cerr << specs.front().name << ": group delay " << r.group_delay << " frames\n";
      emit(c, "filtered.csv", to_csv(r.filtered));
    } else if (bench->parsed()) {
      BenchOptions o{benchmark_noise(c.seed, c.trials), pipelines(c, {"mma5", "three-stage"}),
                     c.threads};
      const auto grid = grid_file.empty() ? table_grid() : read_grid_csv(grid_file);
      std::vector<BenchReport> rows;
      for (DragShape s : shapes_of(c.shape)) {
        auto part = run_table(benchmark_drag(s), grid, o);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const bool md = c.format == "md";
      emit(c, md ? "bench.md" : "bench.csv",
           md ? format_markdown(rows, c.timing) : format_csv(rows, c.timing));
    } else if (sw->parsed()) {
      const SweepAxis ax = parse_axis(axis);
      if (values.empty())
        values = ax == SweepAxis::kVelocity ? std::vector<double>{10, 25, 50, 100, 150, 200}
                                            : std::vector<double>{0, 25, 50, 100};
      BenchOptions o{benchmark_noise(c.seed, c.trials), pipelines(c, {"mma5", "three-stage"}),
                     c.threads};
      const auto rows = sweep(ax, benchmark_drag(parse_shape(c.shape), fixed_velocity), values, o);
      const bool md = c.format == "md";
      emit(c, md ? "sweep.md" : "sweep.csv",
           md ? format_markdown(rows, c.timing) : format_sweep_csv(ax, rows));
    } else if (cal->parsed()) {
      const auto r = calibrate_noise(target, benchmark_drag(parse_shape(c.shape), cal_velocity),
                                     ratio, c.seed, c.trials);
      std::printf("sigma_along = %.6f\nsigma_perp = %.6f\nseed = %llu\ntrials = %d\n"
                  "noisy_measure1 = %.6f\n",
                  r.noise.sigma_along, r.noise.sigma_perp,
                  static_cast<unsigned long long>(r.noise.seed), r.noise.trials, r.achieved);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
