#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "touchsmooth/filter_stage.hpp"

namespace touchsmooth {

struct StageSpec {
  std::string kind;   // mma, mmed, ma, med, oor-a, oor-b, sg, kde, linreg,
                      // theilsen, polar, kalman, pde, delay
  std::string label;  // unique within a pipeline; defaults to kind
  std::map<std::string, std::string> params;
};

struct FeedbackEdge {
  std::string from;  // stage whose outputs are fed back
  std::string to;    // earlier stage whose smoothed history receives them
};

// Bypasses a stage when the estimated input noise SD is below `threshold`.
struct NoiseGate {
  std::string target;
  double threshold = 0.3;  // mm
  int window = 16;         // leading frames used for the estimate
};

struct PipelineSpec {
  std::string name;
  std::vector<StageSpec> stages;
  std::vector<FeedbackEdge> feedback;
  std::optional<int> max_delay;
  std::optional<NoiseGate> gate;
};

// Key-value text: top-level `name = ...`, `max-delay = N`,
// `feedback = a -> b`; then one `[kind]` or `[kind:label]` section per stage
// in feedforward order with `key = value` lines, and an optional `[gate]`
// section with target, threshold and window. `#` starts a comment.
PipelineSpec parse_pipeline_spec(const std::string& text);
std::string to_text(const PipelineSpec& spec);

std::vector<std::string> preset_names();
PipelineSpec preset_spec(const std::string& name);
// Accepts `preset:<name>`, a bare preset name, or a spec file path.
PipelineSpec load_pipeline_spec(const std::string& ref);

std::unique_ptr<FilterStage> make_stage(const StageSpec& spec);

// Per-axis second differences, MAD, scaled to a noise SD and averaged over
// the axes. The scale makes the estimate mean-unbiased for Gaussian noise on
// a 16-frame window.
double estimate_noise_sd(std::span<const Vec2> window);
inline constexpr double kMadSecondDiffScale = 0.5982;

enum class GateDecision { kActive, kBypassed };
GateDecision noise_gate_decision(std::span<const Vec2> window, const NoiseGate& gate);

// A chain of stages evaluated frame by frame. Each feedback edge overwrites
// the target stage's smoothed history for frame f when the source emits f.
class Pipeline final : public FilterStage {
 public:
  explicit Pipeline(PipelineSpec spec);
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  std::string name() const override { return spec_.name; }
  int group_delay() const override;
  std::optional<TracePoint> push(const TracePoint& input) override;
  std::vector<TracePoint> flush() override;
  void reset() override;
  std::unique_ptr<FilterStage> clone() const override;

  const PipelineSpec& spec() const { return spec_; }
  std::vector<std::string> active_stages() const;
  // Takes effect from the next reset; toggling mid-stream is refused.
  void set_bypassed(const std::string& label, bool bypassed);
  bool bypassed(const std::string& label) const;

 private:
  struct Node {
    std::string label;
    std::unique_ptr<FilterStage> stage;
    bool bypassed = false;
    std::vector<std::size_t> feedback_targets;
  };

  std::size_t index_of(const std::string& label) const;
  void deliver(std::size_t from, const TracePoint& p, std::vector<TracePoint>& out);
  void emitted(std::size_t node, const TracePoint& p);

  PipelineSpec spec_;
  std::vector<Node> nodes_;
  bool streaming_ = false;
};

struct FilterResult {
  Trace filtered;  // indexed by the frame each sample estimates
  int group_delay = 0;
  std::vector<std::string> active_stages;
  std::optional<GateDecision> gate;
};

// Resets the pipeline, applies the noise gate (decided once from the leading
// frames of the trace) and streams the trace through it.
FilterResult run(Pipeline& pipeline, const Trace& noisy);

// What a consumer sees live: the sample available at input frame t is the
// estimate of frame t - delay. Before the first estimate exists the view
// holds that first estimate. This is the form align_for_metric expects.
Trace emission_view(const Trace& estimates, int group_delay);

}  // namespace touchsmooth
