// Python bindings. Traces cross the boundary as (N, 2) float64 arrays of
// millimetre coordinates; frames are numbered from 0.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "touchsmooth/evalbench.hpp"
#include "touchsmooth/model_filters.hpp"
#include "touchsmooth/pde.hpp"
#include "touchsmooth/window_filters.hpp"

namespace py = pybind11;
using namespace touchsmooth;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Trace to_trace(const Array& a, double frame_rate) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("expected an (N, 2) array");
  auto r = a.unchecked<2>();
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) pts.push_back({r(i, 0), r(i, 1)});
  Trace t = Trace::from_positions(pts, frame_rate);
  t.validate();
  return t;
}

Array to_array(const Trace& t) {
  Array out({static_cast<py::ssize_t>(t.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < t.size(); ++i) {
    w(i, 0) = t[i].x;
    w(i, 1) = t[i].y;
  }
  return out;
}

PipelineSpec spec_from(const std::string& preset, const std::string& spec) {
  if (!spec.empty()) return parse_pipeline_spec(spec);
  return load_pipeline_spec("preset:" + preset);
}

DragSpec drag_from(const std::string& shape, double velocity, double acceleration,
                   std::optional<double> duration) {
  DragSpec d = benchmark_drag(parse_shape(shape), velocity, acceleration);
  if (duration) d.duration = *duration;
  return d;
}

py::dict report_dict(const BenchReport& r) {
  py::dict d;
  d["shape"] = to_string(r.shape);
  d["velocity"] = r.velocity;
  d["acceleration"] = r.acceleration;
  d["trials"] = r.trials;
  d["frames"] = r.frames;
  d["noisy_mse"] = r.noisy_mse;
  d["noisy_max"] = r.noisy_max;
  py::dict f;
  for (const auto& p : r.filtered) {
    py::dict e;
    e["group_delay"] = p.group_delay;
    e["mse"] = p.mse;
    e["max"] = p.max;
    e["wall_ms"] = p.wall_ms;
    f[py::str(p.preset)] = e;
  }
  d["filtered"] = f;
  return d;
}

}  // namespace

PYBIND11_MODULE(_touchsmooth, m) {
  m.doc() = "touch trace smoothing filters and drag benchmark";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("preset_names", &preset_names);
  m.def("preset_text", [](const std::string& name) { return to_text(preset_spec(name)); },
        py::arg("name"));

  m.def(
      "generate_truth",
      [](const std::string& shape, double velocity, double acceleration,
         std::optional<double> duration) {
        return to_array(generate_truth(drag_from(shape, velocity, acceleration, duration)));
      },
      py::arg("shape") = "linear", py::arg("velocity") = 10.0, py::arg("acceleration") = 0.0,
      py::arg("duration") = py::none(),
      "Noiseless drag sampled at 60 fps; lasts 8 s unless a duration is given.");

  m.def(
      "add_noise",
      [](const Array& truth, double sigma_perp, double sigma_along, std::uint64_t seed,
         int trial) {
        const NoiseSpec n{sigma_perp, sigma_along, seed, std::max(trial + 1, 1)};
        return to_array(add_noise(to_trace(truth, 60.0), n, trial));
      },
      py::arg("truth"), py::arg("sigma_perp") = benchmark_noise().sigma_perp,
      py::arg("sigma_along") = benchmark_noise().sigma_along, py::arg("seed") = 1,
      py::arg("trial") = 0);

  m.def(
      "filter",
      [](const Array& noisy, const std::string& preset, const std::string& spec) {
        const Trace in = to_trace(noisy, 60.0);
        Pipeline p(spec_from(preset, spec));
        FilterResult r;
        {
          py::gil_scoped_release release;
          r = run(p, in);
        }
        return py::make_tuple(to_array(r.filtered), r.group_delay);
      },
      py::arg("noisy"), py::arg("preset") = "three-stage", py::arg("spec") = "",
      "Returns (estimates indexed by the frame they estimate, group delay).");

  m.def(
      "emission_view",
      [](const Array& estimates, int delay) {
        return to_array(emission_view(to_trace(estimates, 60.0), delay));
      },
      py::arg("estimates"), py::arg("group_delay"));

  m.def(
      "measure1",
      [](const Array& ref, const Array& est, int delay) {
        const auto [a, b] = align_for_metric(to_trace(ref, 60.0), to_trace(est, 60.0), delay);
        return measure1(a, b);
      },
      py::arg("reference"), py::arg("shown"), py::arg("group_delay") = 0);

  m.def(
      "max_error",
      [](const Array& ref, const Array& est, int delay) {
        const auto [a, b] = align_for_metric(to_trace(ref, 60.0), to_trace(est, 60.0), delay);
        return max_error(a, b);
      },
      py::arg("reference"), py::arg("shown"), py::arg("group_delay") = 0);

  m.def(
      "calibrate_noise",
      [](double target, const std::string& shape, double velocity, double ratio,
         std::uint64_t seed, int trials) {
        const auto r = calibrate_noise(target, drag_from(shape, velocity, 0.0, std::nullopt),
                                       ratio, seed, trials);
        return py::make_tuple(r.noise.sigma_along, r.noise.sigma_perp, r.achieved);
      },
      py::arg("target") = 1.35, py::arg("shape") = "linear", py::arg("velocity") = 25.0,
      py::arg("ratio") = kBenchmarkNoiseRatio, py::arg("seed") = 1, py::arg("trials") = 100,
      "Returns (sigma_along, sigma_perp, achieved noisy Measure1).");

  m.def(
      "bench",
      [](const std::string& shape, std::vector<std::string> presets, std::uint64_t seed,
         int trials, std::vector<std::pair<double, double>> grid, int threads) {
        std::vector<PipelineSpec> specs;
        for (const auto& p : presets) specs.push_back(load_pipeline_spec("preset:" + p));
        std::vector<GridRow> rows;
        for (const auto& [v, a] : grid) rows.push_back({v, a});
        if (rows.empty()) rows = table_grid();
        std::vector<BenchReport> out;
        {
          py::gil_scoped_release release;
          out = run_table(benchmark_drag(parse_shape(shape)), rows,
                          {benchmark_noise(seed, trials), specs, threads});
        }
        py::list l;
        for (const auto& r : out) l.append(report_dict(r));
        return l;
      },
      py::arg("shape") = "linear",
      py::arg("presets") = std::vector<std::string>{"mma5", "three-stage"}, py::arg("seed") = 1,
      py::arg("trials") = 100, py::arg("grid") = std::vector<std::pair<double, double>>{},
      py::arg("threads") = 0);

  m.def("savitzky_golay_coefficients", &savitzky_golay_coefficients, py::arg("order") = 2,
        py::arg("taps") = 5);
  m.def(
      "diffuse_step",
      [](std::vector<double> s, double k, double dt_step) { return diffuse_step(s, k, dt_step); },
      py::arg("signal"), py::arg("k") = 100.0, py::arg("dt_step") = 0.25);
  m.def(
      "kde_smooth", [](std::vector<double> w) { return kde_smooth(w, KdeConfig{}); },
      py::arg("window"));
  m.def(
      "estimate_noise_sd",
      [](const Array& window) { return estimate_noise_sd(to_trace(window, 60.0).positions()); },
      py::arg("window"));
}
