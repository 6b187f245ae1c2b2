#pragma once

#include <vector>

#include "touchsmooth/trace.hpp"

namespace touchsmooth {

// Pointwise Euclidean errors between two aligned traces of equal length.
std::vector<double> pointwise_errors(const Trace& reference, const Trace& filtered);

// Mean pointwise Euclidean error (reported as "MSE" in the tables, although
// nothing is squared).
double measure1(const Trace& reference, const Trace& filtered);
// Largest pointwise error of one trial; the benchmark takes the max over
// trials.
double max_error(const Trace& reference, const Trace& filtered);
double measure2(const std::vector<Trace>& references,
                const std::vector<Trace>& filtered);

}  // namespace touchsmooth
