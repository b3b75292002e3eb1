#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mktsym {

double mean(std::span<const double> xs);

// Sample standard deviation (n - 1 denominator); zero for fewer than 2 points.
double sample_stdev(std::span<const double> xs);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares y = slope * x + intercept. Requires at least two
// distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Linear-interpolation quantile of an ascending-sorted sample (the
// "type 7" estimator). p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Each index is visited exactly once; callers write results
// into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace mktsym
