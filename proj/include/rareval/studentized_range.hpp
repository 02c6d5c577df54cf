#pragma once

#include <limits>

namespace rareval {

// CDF of the studentized range of `groups` normal means with `df` degrees of
// freedom for the error variance (df may be +infinity).
double studentized_range_cdf(double q, int groups, double df);

// Inverse of studentized_range_cdf in q; absolute error well below 1e-4.
double studentized_range_quantile(double p, int groups, double df);

}  // namespace rareval
