#include "touchsmooth/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>

namespace touchsmooth {

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

const char* to_string(TraceRole role) {
  switch (role) {
    case TraceRole::kGroundTruth:
      return "ground-truth";
    case TraceRole::kNoisy:
      return "noisy";
    case TraceRole::kFiltered:
      return "filtered";
  }
  return "unknown";
}

void Trace::validate() const {
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
    throw Error("frame rate must be positive");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const TracePoint& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error("non-finite coordinate at frame " + std::to_string(p.frame));
    if (p.frame < 0) throw Error("negative frame index");
    if (i > 0 && p.frame != points[i - 1].frame + 1)
      throw Error("frame indices must increase by one (frame " +
                  std::to_string(p.frame) + ")");
  }
}

Trace Trace::from_positions(const std::vector<Vec2>& positions,
                            double frame_rate, TraceRole role) {
  Trace t;
  t.frame_rate = frame_rate;
  t.role = role;
  t.points.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    t.points.push_back({static_cast<std::int64_t>(i), positions[i].x,
                        positions[i].y});
  return t;
}

std::vector<Vec2> Trace::positions() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.pos());
  return out;
}

std::pair<Trace, Trace> align_for_metric(const Trace& reference,
                                         const Trace& filtered,
                                         int group_delay) {
  if (reference.empty() || filtered.empty())
    throw Error("trace too short for delay");
  if (group_delay < 0) throw Error("group delay must be non-negative");
  if (reference.frame_rate != filtered.frame_rate)
    throw Error("incompatible traces");
  const std::size_t n = std::min(reference.size(), filtered.size());
  const auto d = static_cast<std::size_t>(group_delay);
  if (n <= d) throw Error("trace too short for delay");

  Trace ref;
  Trace out;
  ref.frame_rate = out.frame_rate = reference.frame_rate;
  ref.role = reference.role;
  out.role = filtered.role;
  ref.points.assign(reference.points.begin(),
                    reference.points.begin() + static_cast<long>(n - d));
  out.points.reserve(n - d);
  for (std::size_t i = 0; i + d < n; ++i) {
    TracePoint p = filtered.points[i + d];
    p.frame = ref.points[i].frame;
    out.points.push_back(p);
  }
  return {std::move(ref), std::move(out)};
}

std::vector<PolarSample> shift_origin_polar(const Trace& trace) {
  std::vector<PolarSample> out;
  if (trace.empty()) return out;
  out.reserve(trace.size());
  const Vec2 origin = trace[0].pos();
  for (const auto& p : trace.points) {
    const Vec2 d = p.pos() - origin;
    const double r = norm(d);
    out.push_back({r, r == 0.0 ? 0.0 : std::atan2(d.y, d.x)});
  }
  return out;
}

Vec2 polar_to_cartesian(Vec2 origin, PolarSample s) {
  return {origin.x + s.r * std::cos(s.theta), origin.y + s.r * std::sin(s.theta)};
}

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw Error("csv line " + std::to_string(line_no) + ": bad number '" +
                std::string(field) + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const Trace& trace) {
  std::string line;
  out << "frame,x_mm,y_mm\n";
  for (const auto& p : trace.points) {
    line.clear();
    line += std::to_string(p.frame);
    line += ',';
    append_double(line, p.x);
    line += ',';
    append_double(line, p.y);
    line += '\n';
    out << line;
  }
}

std::string to_csv(const Trace& trace) {
  std::ostringstream os;
  write_csv(os, trace);
  return os.str();
}

Trace read_csv(std::istream& in, double frame_rate, TraceRole role) {
  Trace t;
  t.frame_rate = frame_rate;
  t.role = role;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      throw Error("csv line " + std::to_string(line_no) +
                  ": CRLF line endings are not accepted");
    if (line.empty()) continue;
    if (!header) {
      if (line != "frame,x_mm,y_mm")
        throw Error("csv header must be 'frame,x_mm,y_mm'");
      header = true;
      continue;
    }
    std::string_view sv(line);
    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos || sv.find(',', c2 + 1) != sv.npos)
      throw Error("csv line " + std::to_string(line_no) +
                  ": expected 3 fields");
    std::int64_t frame = 0;
    auto fs = sv.substr(0, c1);
    auto res = std::from_chars(fs.data(), fs.data() + fs.size(), frame);
    if (res.ec != std::errc() || res.ptr != fs.data() + fs.size())
      throw Error("csv line " + std::to_string(line_no) + ": bad frame");
    t.points.push_back({frame, parse_double(sv.substr(c1 + 1, c2 - c1 - 1), line_no),
                        parse_double(sv.substr(c2 + 1), line_no)});
  }
  if (!header) throw Error("csv is missing its header");
  t.validate();
  return t;
}

Trace read_csv_file(const std::string& path, double frame_rate,
                    TraceRole role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_csv(in, frame_rate, role);
}

void write_csv_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_csv(out, trace);
}

}  // namespace touchsmooth
