#pragma once

#include <span>
#include <vector>

namespace recest {

/// Order-independent total of a vector (pairwise/cascade summation).
double pairwise_sum(std::span<const double> xs);

std::vector<double> prefix_sums(std::span<const double> xs);

/// Quantile with linear interpolation between order statistics
/// (R type 7): h = (n-1)p, v[floor h] + frac (v[floor h + 1] - v[floor h]).
double quantile(std::vector<double> data, double p);

/// Empirical stand-in for "the series converges": the increase of a
/// partial-sum series over its last quartile is a small fraction of the total.
struct PlateauStats {
    double total = 0.0;
    double last_quartile_increase = 0.0;
    double fraction = 0.0;  // increase / total (0 when total == 0)
    bool plateaued = false;
};
PlateauStats plateau_check(std::span<const double> partial_sums, double frac_threshold = 0.01);

/// Empirical stand-in for "the sequence converges": the last-quartile range
/// is a small fraction of the running maximum.
struct RangeStats {
    double running_max = 0.0;
    double last_quartile_range = 0.0;
    double fraction = 0.0;
    bool stable = false;
};
RangeStats last_quartile_range_check(std::span<const double> series, double frac_threshold = 0.1);

/// Maximum over the last quartile of a series (empirical tail behavior).
double last_quartile_max(std::span<const double> series);

} // namespace recest
