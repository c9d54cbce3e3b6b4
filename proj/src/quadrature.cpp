#include "recest/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "recest/errors.hpp"

namespace recest::diag {

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth, int max_depth) {
    if (depth > max_depth) throw MaxDepthError("quadrature: refinement depth limit reached");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (std::isfinite(delta) && std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double integrate_interval(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    if (tol < 1e-12) throw std::invalid_argument("quadrature: tol below 1e-12");
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, a, b);
    return adaptive(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

double integrate_real_line(const std::function<double(double)>& f, double tol, int max_depth) {
    // x = tan(v): dx = (1 + tan^2 v) dv. The clip at the endpoints discards
    // |x| > ~1e12, below the tolerance floor for integrable tails.
    const double vmax = std::numbers::pi / 2.0 - 1e-12;
    auto g = [&f](double v) {
        const double x = std::tan(v);
        return f(x) * (1.0 + x * x);
    };
    return integrate_interval(g, -vmax, vmax, tol, max_depth);
}

} // namespace recest::diag
