#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "touchsmooth/trace.hpp"

namespace touchsmooth {

// A stateful streaming smoother. Inputs are fed one frame at a time; the
// estimate for frame t is emitted when the input for frame t + group_delay()
// arrives, and flush() emits the estimates still pending at stream end.
//
// Stages that average over "previous smoothed outputs" keep a history of
// their own outputs. A pipeline may overwrite entries of that history with
// the outputs of a later stage (feedback); entries that have not been
// overwritten yet keep the stage's own value.
class FilterStage {
 public:
  virtual ~FilterStage() = default;

  virtual std::string name() const = 0;
  virtual int group_delay() const = 0;

  virtual std::optional<TracePoint> push(const TracePoint& input) = 0;
  virtual std::vector<TracePoint> flush() = 0;
  virtual void reset() = 0;

  virtual bool consumes_history() const { return false; }
  // Replaces the smoothed-history entry for `smoothed.frame`. Frames that are
  // not (or no longer) held in the history are ignored.
  virtual void feedback(const TracePoint& smoothed) { (void)smoothed; }

  // A fresh instance with the same configuration and no stream state.
  virtual std::unique_ptr<FilterStage> clone() const = 0;
};

// Sliding storage of per-frame values with O(1) access by absolute frame.
class FrameBuffer {
 public:
  explicit FrameBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

  void clear() {
    values_.clear();
    first_ = 0;
  }
  void set_capacity(std::size_t capacity) { capacity_ = capacity; }

  // Appends the value for the frame following the newest one.
  void append(std::int64_t frame, Vec2 v);
  bool contains(std::int64_t frame) const {
    return !values_.empty() && frame >= first_ &&
           frame < first_ + static_cast<std::int64_t>(values_.size());
  }
  Vec2 at(std::int64_t frame) const {
    return values_[static_cast<std::size_t>(frame - first_)];
  }
  void set(std::int64_t frame, Vec2 v) {
    values_[static_cast<std::size_t>(frame - first_)] = v;
  }
  bool empty() const { return values_.empty(); }
  std::int64_t first_frame() const { return first_; }
  std::int64_t end_frame() const {
    return first_ + static_cast<std::int64_t>(values_.size());
  }

 private:
  std::deque<Vec2> values_;
  std::int64_t first_ = 0;
  std::size_t capacity_;
};

// What a windowed stage sees when estimating `frame`.
struct StageWindow {
  std::int64_t frame = 0;
  std::vector<Vec2> history;      // smoothed values, oldest first, ending at frame-1
  std::vector<Vec2> past_inputs;  // raw inputs, oldest first, ending at frame-1
  std::vector<Vec2> ahead;        // raw inputs for frame, frame+1, ...
  bool flushing = false;          // the stream has ended; `ahead` may be short
};

// Trims a window so that at the start of a stream the past and future sides
// have the same length (at most `half_width` each). Away from the start this
// is a no-op apart from capping both sides at `half_width`.
void balance_head(StageWindow& w, int half_width);

// Base for stages that estimate a frame from a bounded window of past
// smoothed values, past raw inputs and future raw inputs.
class WindowedStage : public FilterStage {
 public:
  int group_delay() const override { return lookahead_; }
  std::optional<TracePoint> push(const TracePoint& input) override;
  std::vector<TracePoint> flush() override;
  void reset() override;
  bool consumes_history() const override { return history_len_ > 0; }
  void feedback(const TracePoint& smoothed) override;

 protected:
  WindowedStage(int history_len, int past_input_len, int lookahead);

  virtual Vec2 estimate(const StageWindow& w) = 0;
  virtual void on_reset() {}

 private:
  TracePoint emit(bool flushing);

  int history_len_;
  int past_len_;
  int lookahead_;
  FrameBuffer inputs_;
  FrameBuffer history_;
  std::int64_t next_frame_ = 0;  // next frame to estimate
  bool started_ = false;
};

// Runs a single stage over a whole trace and returns the estimates indexed
// by the frame they estimate (same length and frames as the input).
Trace run_stage(FilterStage& stage, const Trace& input);

}  // namespace touchsmooth
