#include "touchsmooth/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "touchsmooth/kalman.hpp"
#include "touchsmooth/model_filters.hpp"
#include "touchsmooth/pde.hpp"
#include "touchsmooth/window_filters.hpp"

namespace touchsmooth {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& where, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw Error(where + ": '" + v + "' is not a number");
  return out;
}

int parse_int(const std::string& where, const std::string& v) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw Error(where + ": '" + v + "' is not an integer");
  return out;
}

FeedbackEdge parse_edge(const std::string& v) {
  const auto arrow = v.find("->");
  if (arrow == std::string::npos) throw Error("feedback must read '<from> -> <to>'");
  FeedbackEdge e{trim(v.substr(0, arrow)), trim(v.substr(arrow + 2))};
  if (e.from.empty() || e.to.empty()) throw Error("feedback must read '<from> -> <to>'");
  return e;
}

}  // namespace

PipelineSpec parse_pipeline_spec(const std::string& text) {
  PipelineSpec spec;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  enum class Section { kTop, kStage, kGate } section = Section::kTop;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);

    if (line.front() == '[') {
      if (line.back() != ']') throw Error(where + ": unterminated section header");
      const std::string head = trim(line.substr(1, line.size() - 2));
      if (head == "gate") {
        if (spec.gate) throw Error(where + ": duplicate [gate] section");
        spec.gate = NoiseGate{};
        section = Section::kGate;
        continue;
      }
      StageSpec st;
      const auto colon = head.find(':');
      st.kind = trim(head.substr(0, colon));
      st.label = colon == std::string::npos ? st.kind : trim(head.substr(colon + 1));
      if (st.kind.empty() || st.label.empty()) throw Error(where + ": empty stage name");
      spec.stages.push_back(std::move(st));
      section = Section::kStage;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(where + ": empty key");

    switch (section) {
      case Section::kTop:
        if (key == "name") {
          spec.name = value;
        } else if (key == "max-delay") {
          spec.max_delay = parse_int(where, value);
        } else if (key == "feedback") {
          spec.feedback.push_back(parse_edge(value));
        } else {
          throw Error(where + ": unknown key '" + key + "'");
        }
        break;
      case Section::kGate:
        if (key == "target") {
          spec.gate->target = value;
        } else if (key == "threshold") {
          spec.gate->threshold = parse_double(where, value);
        } else if (key == "window") {
          spec.gate->window = parse_int(where, value);
        } else {
          throw Error(where + ": unknown gate key '" + key + "'");
        }
        break;
      case Section::kStage:
        if (!spec.stages.back().params.emplace(key, value).second)
          throw Error(where + ": duplicate key '" + key + "'");
        break;
    }
  }
  if (spec.name.empty()) spec.name = "custom";
  return spec;
}

std::string to_text(const PipelineSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << '\n';
  if (spec.max_delay) out << "max-delay = " << *spec.max_delay << '\n';
  for (const auto& e : spec.feedback) out << "feedback = " << e.from << " -> " << e.to << '\n';
  for (const auto& st : spec.stages) {
    out << "\n[" << st.kind;
    if (st.label != st.kind) out << ':' << st.label;
    out << "]\n";
    for (const auto& [k, v] : st.params) out << k << " = " << v << '\n';
  }
  if (spec.gate) {
    out << "\n[gate]\ntarget = " << spec.gate->target
        << "\nthreshold = " << spec.gate->threshold
        << "\nwindow = " << spec.gate->window << '\n';
  }
  return out.str();
}

namespace {

struct Preset {
  const char* name;
  const char* text;
};

// Every preset totals five frames of delay, the budget of the baseline
// moving average (the gated one drops to four while its PDE is bypassed).
// The Kalman stages count time in seconds at 60 fps.
constexpr Preset kPresets[] = {
    {"mma5", R"(name = mma5
[mma]
n = 5
)"},
    {"three-stage", R"(name = three-stage
feedback = kalman -> pde
[pde]
buffer = 6
[kalman]
dt = 0.016666666666666666
scale-fact = 1e14
[mma]
n = 4
)"},
    {"three-stage-gated", R"(name = three-stage-gated
feedback = kalman -> pde
[pde]
buffer = 6
[kalman]
dt = 0.016666666666666666
scale-fact = 1e14
[mma]
n = 4
[gate]
target = pde
threshold = 0.3
window = 16
)"},
    {"a", R"(name = a
feedback = oor-b -> mmed
[mmed]
n = 3
[oor-b]
n = 2
)"},
    {"b", R"(name = b
feedback = mma -> kde
[kde]
n = 2
[mma]
n = 3
)"},
    {"c", R"(name = c
feedback = mmed -> oor-b
[oor-b]
n = 1
[linreg]
m = 7
n = 3
[mmed]
n = 1
)"},
    {"d", R"(name = d
feedback = kalman -> pde
[pde]
buffer = 6
[kalman]
dt = 0.016666666666666666
scale-fact = 1e14
[mma]
n = 4
)"},
    {"mma-sg", R"(name = mma-sg
[mma]
n = 3
[sg]
order = 2
taps = 5
)"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

PipelineSpec preset_spec(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return parse_pipeline_spec(p.text);
  throw Error("unknown preset '" + name + "'");
}

PipelineSpec load_pipeline_spec(const std::string& ref) {
  if (ref.rfind("preset:", 0) == 0) return preset_spec(ref.substr(7));
  for (const auto& p : kPresets)
    if (ref == p.name) return preset_spec(ref);
  std::ifstream in(ref);
  if (!in) throw Error("cannot open pipeline spec '" + ref + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_pipeline_spec(text.str());
}

namespace {

// Reads typed parameters and rejects keys nobody asked for.
class Params {
 public:
  explicit Params(const StageSpec& s) : spec_(s) {}

  int get_int(const std::string& key, int fallback) {
    used_.insert(key);
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : parse_int(where(key), it->second);
  }
  double get_double(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : parse_double(where(key), it->second);
  }
  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : it->second;
  }
  void finish() const {
    for (const auto& [k, v] : spec_.params)
      if (!used_.count(k))
        throw Error("stage '" + spec_.label + "': unknown key '" + k + "'");
  }

 private:
  std::string where(const std::string& key) const {
    return "stage '" + spec_.label + "' key '" + key + "'";
  }
  const StageSpec& spec_;
  std::set<std::string> used_;
};

std::unique_ptr<FilterStage> build(const StageSpec& s, Params& p) {
  const std::string& k = s.kind;
  if (k == "mma" || k == "mmed" || k == "ma" || k == "med") {
    WindowConfig c;
    c.n = p.get_int("n", 5);
    c.mode = k == "mma"    ? WindowMode::kModifiedAverage
             : k == "mmed" ? WindowMode::kModifiedMedian
             : k == "ma"   ? WindowMode::kPlainAverage
                           : WindowMode::kPlainMedian;
    return std::make_unique<MovingWindowStage>(c);
  }
  if (k == "oor-a" || k == "oor-b") {
    OddOneRemovedConfig c;
    c.n = p.get_int("n", 2);
    c.variant = k == "oor-a" ? OddVariant::kA : OddVariant::kB;
    return std::make_unique<OddOneRemovedStage>(c);
  }
  if (k == "sg") {
    SavitzkyGolayConfig c;
    c.order = p.get_int("order", 2);
    c.taps = p.get_int("taps", 5);
    return std::make_unique<SavitzkyGolayStage>(c);
  }
  if (k == "kde") {
    KdeConfig c;
    c.n = p.get_int("n", 2);
    const std::string bw = p.get_string("bandwidth", "window-sd");
    if (bw != "window-sd") {
      c.bandwidth_rule = BandwidthRule::kFixed;
      c.fixed_bandwidth = parse_double("stage '" + s.label + "' key 'bandwidth'", bw);
    }
    c.sd_tol = p.get_double("sd-tol", c.sd_tol);
    c.move_tol = p.get_double("move-tol", c.move_tol);
    c.max_iters = p.get_int("max-iters", c.max_iters);
    return std::make_unique<KdeStage>(c);
  }
  if (k == "linreg" || k == "theilsen") {
    RegressionConfig c;
    c.m = p.get_int("m", c.m);
    c.n = p.get_int("n", c.n);
    c.method = k == "linreg" ? RegressionMethod::kLeastSquares : RegressionMethod::kTheilSen;
    const std::string odd = p.get_string("odd-removal", "none");
    if (odd == "none") c.odd_removal = OddRemoval::kNone;
    else if (odd == "c") c.odd_removal = OddRemoval::kVariantC;
    else if (odd == "d") c.odd_removal = OddRemoval::kVariantD;
    else throw Error("stage '" + s.label + "': odd-removal must be none, c or d");
    return std::make_unique<RegressionStage>(c);
  }
  if (k == "polar") {
    PolarConfig c;
    c.r_window.n = p.get_int("n", c.r_window.n);
    const std::string mode = p.get_string("r-mode", "average");
    if (mode == "median") c.r_window.mode = WindowMode::kModifiedMedian;
    else if (mode != "average") throw Error("stage '" + s.label + "': r-mode must be average or median");
    c.alpha = p.get_double("alpha", c.alpha);
    return std::make_unique<PolarStage>(c);
  }
  if (k == "kalman") {
    KalmanConfig c;
    c.dt = p.get_double("dt", c.dt);
    c.noise_window = p.get_int("noise-window", c.noise_window);
    c.scale_fact = p.get_double("scale-fact", c.scale_fact);
    c.q_coeff = p.get_double("q-coeff", c.q_coeff);
    c.warmup = p.get_int("warmup", c.warmup);
    return std::make_unique<KalmanStage>(c);
  }
  if (k == "pde") {
    PdeConfig c;
    c.k = p.get_double("k", c.k);
    c.dt_step = p.get_double("dt-step", c.dt_step);
    c.max_iters = p.get_int("max-iters", c.max_iters);
    c.conv_tol = p.get_double("conv-tol", c.conv_tol);
    c.buffer = p.get_int("buffer", c.buffer);
    return std::make_unique<PdeStage>(c);
  }
  if (k == "delay") return std::make_unique<PureDelayStage>(p.get_int("frames", 1));
  throw Error("stage '" + s.label + "': unknown stage kind '" + k + "'");
}

}  // namespace

std::unique_ptr<FilterStage> make_stage(const StageSpec& spec) {
  Params p(spec);
  std::unique_ptr<FilterStage> stage;
  try {
    stage = build(spec, p);
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind("stage '", 0) == 0) throw;
    throw Error("stage '" + spec.label + "': " + msg);
  }
  p.finish();
  return stage;
}

// ---------------------------------------------------------------------------

double estimate_noise_sd(std::span<const Vec2> window) {
  if (window.size() < 4) throw Error("noise estimate needs at least four points");
  auto axis = [&](auto coord) {
    std::vector<double> d2;
    for (std::size_t i = 1; i + 1 < window.size(); ++i)
      d2.push_back(coord(window[i + 1]) - 2.0 * coord(window[i]) + coord(window[i - 1]));
    const double med = median(d2);
    for (double& v : d2) v = std::abs(v - med);
    return kMadSecondDiffScale * median(std::move(d2));
  };
  return 0.5 * (axis([](Vec2 v) { return v.x; }) + axis([](Vec2 v) { return v.y; }));
}

GateDecision noise_gate_decision(std::span<const Vec2> window, const NoiseGate& gate) {
  if (gate.threshold <= 0.0) return GateDecision::kActive;
  return estimate_noise_sd(window) < gate.threshold ? GateDecision::kBypassed
                                                    : GateDecision::kActive;
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(PipelineSpec spec) : spec_(std::move(spec)) {
  if (spec_.stages.empty()) throw Error("pipeline '" + spec_.name + "' has no stages");
  std::set<std::string> seen;
  for (const auto& st : spec_.stages) {
    if (!seen.insert(st.label).second)
      throw Error("duplicate stage label '" + st.label + "'");
    nodes_.push_back({st.label, make_stage(st), false, {}});
  }
  for (const auto& e : spec_.feedback) {
    const std::size_t from = index_of(e.from);
    const std::size_t to = index_of(e.to);
    if (to >= from)
      throw Error("feedback " + e.from + " -> " + e.to +
                  " must point from a later stage to an earlier one");
    if (!nodes_[to].stage->consumes_history())
      throw Error("stage '" + e.to + "' keeps no smoothed history to feed back into");
    nodes_[from].feedback_targets.push_back(to);
  }
  if (spec_.gate) {
    index_of(spec_.gate->target);
    if (spec_.gate->window < 4) throw Error("gate window must be >= 4");
  }
  if (spec_.max_delay && group_delay() > *spec_.max_delay)
    throw Error("pipeline '" + spec_.name + "' delay " + std::to_string(group_delay()) +
                " exceeds max-delay " + std::to_string(*spec_.max_delay));
}

std::size_t Pipeline::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].label == label) return i;
  throw Error("pipeline '" + spec_.name + "' has no stage '" + label + "'");
}

int Pipeline::group_delay() const {
  int d = 0;
  for (const auto& n : nodes_)
    if (!n.bypassed) d += n.stage->group_delay();
  return d;
}

std::vector<std::string> Pipeline::active_stages() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (!n.bypassed) out.push_back(n.label);
  return out;
}

void Pipeline::set_bypassed(const std::string& label, bool bypassed) {
  if (streaming_) throw Error("stages can only be bypassed between traces");
  nodes_[index_of(label)].bypassed = bypassed;
  if (std::all_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.bypassed; }))
    throw Error("pipeline '" + spec_.name + "' cannot bypass every stage");
}

bool Pipeline::bypassed(const std::string& label) const {
  return nodes_[index_of(label)].bypassed;
}

void Pipeline::emitted(std::size_t node, const TracePoint& p) {
  for (std::size_t t : nodes_[node].feedback_targets)
    if (!nodes_[t].bypassed) nodes_[t].stage->feedback(p);
}

void Pipeline::deliver(std::size_t from, const TracePoint& p, std::vector<TracePoint>& out) {
  std::optional<TracePoint> cur = p;
  for (std::size_t i = from; i < nodes_.size() && cur; ++i) {
    Node& n = nodes_[i];
    if (n.bypassed) continue;
    try {
      cur = n.stage->push(*cur);
    } catch (const Error& e) {
      throw Error("stage '" + n.label + "': " + e.what());
    }
    if (cur) emitted(i, *cur);
  }
  if (cur) out.push_back(*cur);
}

std::optional<TracePoint> Pipeline::push(const TracePoint& input) {
  streaming_ = true;
  std::vector<TracePoint> out;
  deliver(0, input, out);
  if (out.empty()) return std::nullopt;
  return out.front();
}

std::vector<TracePoint> Pipeline::flush() {
  std::vector<TracePoint> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (n.bypassed) continue;
    std::vector<TracePoint> pending;
    try {
      pending = n.stage->flush();
    } catch (const Error& e) {
      throw Error("stage '" + n.label + "': " + e.what());
    }
    for (const auto& p : pending) {
      emitted(i, p);
      if (i + 1 < nodes_.size()) deliver(i + 1, p, out);
      else out.push_back(p);
    }
  }
  return out;
}

void Pipeline::reset() {
  for (auto& n : nodes_) n.stage->reset();
  streaming_ = false;
}

std::unique_ptr<FilterStage> Pipeline::clone() const {
  auto p = std::make_unique<Pipeline>(spec_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) p->nodes_[i].bypassed = nodes_[i].bypassed;
  return p;
}

FilterResult run(Pipeline& pipeline, const Trace& noisy) {
  noisy.validate();
  pipeline.reset();
  FilterResult r;
  if (const auto& gate = pipeline.spec().gate) {
    const auto n = std::min<std::size_t>(noisy.size(), static_cast<std::size_t>(gate->window));
    const auto pts = noisy.positions();
    r.gate = n >= 4 ? noise_gate_decision(std::span(pts).first(n), *gate) : GateDecision::kActive;
    pipeline.set_bypassed(gate->target, *r.gate == GateDecision::kBypassed);
  }
  r.filtered.frame_rate = noisy.frame_rate;
  r.filtered.role = TraceRole::kFiltered;
  r.filtered.points.reserve(noisy.size());
  for (const auto& p : noisy.points)
    if (auto est = pipeline.push(p)) r.filtered.points.push_back(*est);
  for (const auto& p : pipeline.flush()) r.filtered.points.push_back(p);
  r.group_delay = pipeline.group_delay();
  r.active_stages = pipeline.active_stages();
  pipeline.reset();
  return r;
}

Trace emission_view(const Trace& estimates, int group_delay) {
  if (group_delay < 0) throw Error("group delay must be non-negative");
  Trace out;
  out.frame_rate = estimates.frame_rate;
  out.role = estimates.role;
  if (estimates.empty()) return out;
  const auto d = static_cast<std::size_t>(group_delay);
  const std::int64_t f0 = estimates[0].frame;
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    const TracePoint& src = estimates[t < d ? 0 : t - d];
    out.points.push_back({f0 + static_cast<std::int64_t>(t), src.x, src.y});
  }
  return out;
}

}  // namespace touchsmooth
