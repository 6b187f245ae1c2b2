#pragma once

#include <span>
#include <vector>

#include "touchsmooth/filter_stage.hpp"

namespace touchsmooth {

struct PdeConfig {
  double k = 100.0;        // gradient influence constant, mm
  double dt_step = 0.25;   // explicit step; stable up to 0.5
  int max_iters = 1000;
  double conv_tol = 1e-6;  // mm, largest per-point change that counts as settled
  int buffer = 16;         // streaming window length in frames

  void validate() const;
};

// Edge-stopping weight 1 / (1 + (d/k)^2).
double influence(double d, double k);

// One synchronous explicit pass. Endpoints stay fixed.
std::vector<double> diffuse_step(std::span<const double> signal, double k,
                                 double dt_step);

struct DiffusionResult {
  std::vector<double> values;
  int iterations = 0;
};

// Repeats diffuse_step until no point moves by conv_tol or more, or until
// max_iters passes. Signals shorter than three samples are returned as is.
DiffusionResult diffuse_batch(std::span<const double> signal,
                              const PdeConfig& config);

// Streaming form: the window is [up to buffer-2 refined past values, current
// input, one future input]; the value diffused at the current position is
// emitted and becomes the refined history for later frames, unless a later
// pipeline stage overwrites it through feedback.
class PdeStage final : public WindowedStage {
 public:
  explicit PdeStage(PdeConfig config);
  std::string name() const override { return "pde"; }
  std::unique_ptr<FilterStage> clone() const override;

 protected:
  Vec2 estimate(const StageWindow& w) override;

 private:
  PdeConfig config_;
};

}  // namespace touchsmooth
