#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace touchsmooth {

// Raised for malformed traces, bad configurations and violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double norm(Vec2 v);

// One frame's coordinate sample, in millimeters.
struct TracePoint {
  std::int64_t frame = 0;
  double x = 0.0;
  double y = 0.0;

  Vec2 pos() const { return {x, y}; }
  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

enum class TraceRole { kGroundTruth, kNoisy, kFiltered };

const char* to_string(TraceRole role);

// Ordered frame samples. Frames are contiguous (strictly increasing by one)
// and coordinates are finite; `validate()` enforces both.
struct Trace {
  std::vector<TracePoint> points;
  double frame_rate = 60.0;
  TraceRole role = TraceRole::kNoisy;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const TracePoint& operator[](std::size_t i) const { return points[i]; }

  void validate() const;

  // Builds a trace with frames 0..n-1 from raw coordinates.
  static Trace from_positions(const std::vector<Vec2>& positions,
                              double frame_rate = 60.0,
                              TraceRole role = TraceRole::kNoisy);
  std::vector<Vec2> positions() const;
};

// A filter output for one frame together with the lookahead it consumed.
struct DelayedOutput {
  TracePoint point;
  int group_delay = 0;
};

// Pairs `reference` with a filtered trace given in emission order, where the
// sample emitted at index i estimates reference frame i - group_delay. The
// last `group_delay` reference samples and the first `group_delay` emitted
// samples have no partner and are dropped.
std::pair<Trace, Trace> align_for_metric(const Trace& reference,
                                         const Trace& filtered,
                                         int group_delay);

struct PolarSample {
  double r = 0.0;      // mm
  double theta = 0.0;  // radians, in (-pi, pi]
};

// Polar coordinates about the first point of the trace. A zero vector maps
// to theta = 0.
std::vector<PolarSample> shift_origin_polar(const Trace& trace);
Vec2 polar_to_cartesian(Vec2 origin, PolarSample sample);

// CSV with header `frame,x_mm,y_mm`, LF line endings.
void write_csv(std::ostream& out, const Trace& trace);
std::string to_csv(const Trace& trace);
Trace read_csv(std::istream& in, double frame_rate = 60.0,
               TraceRole role = TraceRole::kNoisy);
Trace read_csv_file(const std::string& path, double frame_rate = 60.0,
                    TraceRole role = TraceRole::kNoisy);
void write_csv_file(const std::string& path, const Trace& trace);

}  // namespace touchsmooth
