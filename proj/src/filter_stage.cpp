#include "touchsmooth/filter_stage.hpp"

#include <algorithm>
#include <cmath>

namespace touchsmooth {

void FrameBuffer::append(std::int64_t frame, Vec2 v) {
  if (values_.empty()) {
    first_ = frame;
  } else if (frame != end_frame()) {
    throw Error("frame " + std::to_string(frame) + " does not follow frame " +
                std::to_string(end_frame() - 1));
  }
  values_.push_back(v);
  while (capacity_ > 0 && values_.size() > capacity_) {
    values_.pop_front();
    ++first_;
  }
}

namespace {

template <typename T>
void keep_last(std::vector<T>& v, std::size_t n) {
  if (v.size() > n) v.erase(v.begin(), v.end() - static_cast<long>(n));
}

}  // namespace

void balance_head(StageWindow& w, int half_width) {
  const auto n = static_cast<std::size_t>(std::max(half_width, 0));
  const std::size_t past = std::max(w.history.size(), w.past_inputs.size());
  const std::size_t future = w.ahead.empty() ? 0 : w.ahead.size() - 1;
  std::size_t keep_past = std::min(past, n);
  std::size_t keep_future = std::min(future, n);
  if (past < n) keep_past = keep_future = std::min(past, keep_future);
  keep_last(w.history, keep_past);
  keep_last(w.past_inputs, keep_past);
  if (w.ahead.size() > keep_future + 1) w.ahead.resize(keep_future + 1);
}

WindowedStage::WindowedStage(int history_len, int past_input_len,
                             int lookahead)
    : history_len_(history_len),
      past_len_(past_input_len),
      lookahead_(lookahead),
      inputs_(static_cast<std::size_t>(past_input_len + lookahead + 1)),
      history_(static_cast<std::size_t>(std::max(history_len, 1))) {
  if (history_len < 0 || past_input_len < 0 || lookahead < 0)
    throw Error("window lengths must be non-negative");
}

std::optional<TracePoint> WindowedStage::push(const TracePoint& input) {
  if (!std::isfinite(input.x) || !std::isfinite(input.y))
    throw Error(name() + ": non-finite input at frame " +
                std::to_string(input.frame));
  if (!started_) {
    started_ = true;
    next_frame_ = input.frame;
  }
  inputs_.append(input.frame, input.pos());
  if (input.frame - next_frame_ >= lookahead_) return emit(false);
  return std::nullopt;
}

std::vector<TracePoint> WindowedStage::flush() {
  std::vector<TracePoint> out;
  while (started_ && next_frame_ < inputs_.end_frame()) out.push_back(emit(true));
  return out;
}

void WindowedStage::reset() {
  inputs_.clear();
  history_.clear();
  next_frame_ = 0;
  started_ = false;
  on_reset();
}

void WindowedStage::feedback(const TracePoint& smoothed) {
  if (history_len_ > 0 && history_.contains(smoothed.frame))
    history_.set(smoothed.frame, smoothed.pos());
}

TracePoint WindowedStage::emit(bool flushing) {
  StageWindow w;
  const std::int64_t e = next_frame_;
  w.frame = e;
  w.flushing = flushing;
  for (std::int64_t f = e - history_len_; f < e; ++f)
    if (history_len_ > 0 && history_.contains(f)) w.history.push_back(history_.at(f));
  for (std::int64_t f = e - past_len_; f < e; ++f)
    if (inputs_.contains(f)) w.past_inputs.push_back(inputs_.at(f));
  for (std::int64_t f = e; f <= e + lookahead_ && inputs_.contains(f); ++f)
    w.ahead.push_back(inputs_.at(f));

  const Vec2 out = estimate(w);
  if (!std::isfinite(out.x) || !std::isfinite(out.y))
    throw Error(name() + ": produced a non-finite estimate at frame " +
                std::to_string(e));
  if (history_len_ > 0) history_.append(e, out);
  ++next_frame_;
  return {e, out.x, out.y};
}

Trace run_stage(FilterStage& stage, const Trace& input) {
  input.validate();
  stage.reset();
  Trace out;
  out.frame_rate = input.frame_rate;
  out.role = TraceRole::kFiltered;
  out.points.reserve(input.size());
  for (const auto& p : input.points)
    if (auto est = stage.push(p)) out.points.push_back(*est);
  for (const auto& p : stage.flush()) out.points.push_back(p);
  return out;
}

}  // namespace touchsmooth
