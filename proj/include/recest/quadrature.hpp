#pragma once

#include <functional>

namespace recest::diag {

/// Integral of f over the whole real line by adaptive Simpson refinement on
/// the compactified domain x = tan(v), v in (-pi/2, pi/2). Absolute error
/// bounded by tol against the refinement estimate. Throws MaxDepthError when
/// refinement exceeds max_depth and std::invalid_argument for tol < 1e-12.
double integrate_real_line(const std::function<double(double)>& f, double tol,
                           int max_depth = 50);

/// Adaptive Simpson on a finite interval (same refinement rule).
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth = 50);

} // namespace recest::diag
