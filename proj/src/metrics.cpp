#include "touchsmooth/metrics.hpp"

#include <algorithm>

namespace touchsmooth {

std::vector<double> pointwise_errors(const Trace& reference, const Trace& filtered) {
  if (reference.size() != filtered.size())
    throw Error("length mismatch: " + std::to_string(reference.size()) + " vs " +
                std::to_string(filtered.size()));
  if (reference.empty()) throw Error("metric over an empty trace");
  std::vector<double> out(reference.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = norm(reference[i].pos() - filtered[i].pos());
  return out;
}

double measure1(const Trace& reference, const Trace& filtered) {
  const auto e = pointwise_errors(reference, filtered);
  double sum = 0.0;
  for (double v : e) sum += v;
  return sum / static_cast<double>(e.size());
}

double max_error(const Trace& reference, const Trace& filtered) {
  const auto e = pointwise_errors(reference, filtered);
  return *std::max_element(e.begin(), e.end());
}

double measure2(const std::vector<Trace>& references,
                const std::vector<Trace>& filtered) {
  if (references.size() != filtered.size() || references.empty())
    throw Error("measure2 needs one filtered trace per reference");
  double m = 0.0;
  for (std::size_t j = 0; j < references.size(); ++j)
    m = std::max(m, max_error(references[j], filtered[j]));
  return m;
}

}  // namespace touchsmooth
