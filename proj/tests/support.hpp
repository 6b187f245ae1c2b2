#pragma once
#include <random>
#include <vector>

#include "touchsmooth/trace.hpp"

namespace testing_support {

using touchsmooth::Trace;
using touchsmooth::Vec2;

inline Trace ramp(int frames, Vec2 step, Vec2 start = {0.0, 0.0}) {
  std::vector<Vec2> p;
  for (int i = 0; i < frames; ++i) p.push_back(start + static_cast<double>(i) * step);
  return Trace::from_positions(p);
}

inline std::vector<double> uniform(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = d(rng);
  return v;
}

inline std::vector<Vec2> uniform2(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<Vec2> v(static_cast<std::size_t>(n));
  for (auto& p : v) p = {d(rng), d(rng)};
  return v;
}

}  // namespace testing_support
