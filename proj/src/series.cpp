#include "recest/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recest {

namespace {

double pairwise_sum_range(std::span<const double> xs, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += xs[i];
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum_range(xs, lo, mid) + pairwise_sum_range(xs, mid, hi);
}

/// First index of the last quartile of a length-n series; the final element
/// alone when n < 4.
std::size_t quartile_start(std::size_t n) {
    const std::size_t q = n / 4;
    return q == 0 ? n - 1 : n - q;
}

} // namespace

double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwise_sum_range(xs, 0, xs.size());
}

std::vector<double> prefix_sums(std::span<const double> xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    double acc = 0.0;
    for (double x : xs) {
        acc += x;
        out.push_back(acc);
    }
    return out;
}

double quantile(std::vector<double> data, double p) {
    if (data.empty()) throw std::invalid_argument("quantile: empty data");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
    std::sort(data.begin(), data.end());
    const double h = (static_cast<double>(data.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, data.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return data[lo] + frac * (data[hi] - data[lo]);
}

PlateauStats plateau_check(std::span<const double> partial_sums, double frac_threshold) {
    PlateauStats st;
    if (partial_sums.empty()) return st;
    const std::size_t n = partial_sums.size();
    const std::size_t k = quartile_start(n);
    st.total = partial_sums[n - 1];
    const double before = k == 0 ? 0.0 : partial_sums[k - 1];
    st.last_quartile_increase = st.total - before;
    st.fraction = st.total != 0.0 ? st.last_quartile_increase / st.total : 0.0;
    st.plateaued = st.fraction < frac_threshold;
    return st;
}

RangeStats last_quartile_range_check(std::span<const double> series, double frac_threshold) {
    RangeStats st;
    if (series.empty()) return st;
    const std::size_t n = series.size();
    st.running_max = *std::max_element(series.begin(), series.end());
    const std::size_t k = quartile_start(n);
    double lo = series[k];
    double hi = series[k];
    for (std::size_t i = k; i < n; ++i) {
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
    }
    st.last_quartile_range = hi - lo;
    st.fraction = st.running_max > 0.0 ? st.last_quartile_range / st.running_max : 0.0;
    st.stable = st.running_max > 0.0 ? st.last_quartile_range < frac_threshold * st.running_max
                                     : true;
    return st;
}

double last_quartile_max(std::span<const double> series) {
    if (series.empty()) throw std::invalid_argument("last_quartile_max: empty series");
    const std::size_t n = series.size();
    double m = series[quartile_start(n)];
    for (std::size_t i = quartile_start(n); i < n; ++i) m = std::max(m, series[i]);
    return m;
}

} // namespace recest
