#include "recest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "recest/errors.hpp"
#include "recest/quadrature.hpp"
#include "recest/series.hpp"

namespace recest::diag {

namespace {

constexpr std::size_t kMaxWitnesses = 200;

std::size_t witness_stride(std::size_t n) {
    return n <= kMaxWitnesses ? 1 : (n + kMaxWitnesses - 1) / kMaxWitnesses;
}

std::string format_interval(double r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "|u| <= %.6g", r);
    return buf;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }
double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

void require_scalar_model(const models::IidModel& model, const char* who) {
    if (model.dim != 1)
        throw std::invalid_argument(std::string(who) + ": scalar-parameter models only");
}

/// b(u) for an i.i.d. model: closed form when present, else quadrature of
/// psi(u, x) against the density at the origin. Returns whether the
/// fallback was used.
std::pair<std::function<double(double)>, bool> iid_drift_fn(const models::IidModel& model) {
    if (model.drift)
        return {[d = model.drift](double u) { return d(ParamVec{u}).scalar(); }, false};
    if (model.density && model.psi) {
        auto fn = [&model](double u) {
            return integrate_real_line(
                [&model, u](double x) {
                    return model.psi(ParamVec{u}, x).scalar() * model.density(0.0, x);
                },
                1e-8);
        };
        return {fn, true};
    }
    throw MissingDriftError("check_B1: model has neither closed-form drift nor a density for quadrature");
}

std::pair<std::function<double(double)>, bool> iid_second_moment_fn(const models::IidModel& model) {
    if (model.second_moment)
        return {[m = model.second_moment](double u) { return m(ParamVec{u}).scalar(); }, false};
    if (model.density && model.psi) {
        auto fn = [&model](double u) {
            return integrate_real_line(
                [&model, u](double x) {
                    const double p = model.psi(ParamVec{u}, x).scalar();
                    return p * p * model.density(0.0, x);
                },
                1e-8);
        };
        return {fn, true};
    }
    throw MissingDriftError("check_B2: model has neither closed-form second moment nor a density");
}

} // namespace

std::vector<double> grid_points(const GridSpec& grid) {
    if (grid.n_points < 3) throw std::invalid_argument("GridSpec: n_points < 3");
    if (!(grid.lo < grid.hi)) throw std::invalid_argument("GridSpec: lo >= hi");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(grid.n_points));
    const double step = (grid.hi - grid.lo) / (grid.n_points - 1);
    for (int i = 0; i < grid.n_points; ++i) pts.push_back(grid.lo + step * i);
    return pts;
}

void ConditionReport::set_param(const std::string& name, double value) {
    for (auto& [k, v] : parameters)
        if (k == name) {
            v = value;
            return;
        }
    parameters.emplace_back(name, value);
}

double ConditionReport::param(const std::string& name) const {
    for (const auto& [k, v] : parameters)
        if (k == name) return v;
    throw std::out_of_range("ConditionReport: no parameter " + name);
}

bool ConditionReport::has_param(const std::string& name) const {
    for (const auto& [k, v] : parameters)
        if (k == name) return true;
    return false;
}

// ---------------------------------------------------------------------------
// (B1), (B2), stability matrix
// ---------------------------------------------------------------------------

ConditionReport check_B1(const models::IidModel& model, const SquareMatrix& C,
                         const GridSpec& grid) {
    require_scalar_model(model, "check_B1");
    if (C.dim() != 1) throw std::invalid_argument("check_B1: C must be 1x1 for scalar models");
    if (!C.is_symmetric() || C(0, 0) < 0.0)
        throw std::invalid_argument("check_B1: C must be symmetric non-negative definite");

    auto [drift_fn, fallback] = iid_drift_fn(model);

    ConditionReport rep;
    rep.condition = "B1";
    rep.model = model.id;
    rep.set_param("c", C(0, 0));
    rep.set_param("grid_lo", grid.lo);
    rep.set_param("grid_hi", grid.hi);
    rep.set_param("grid_n", grid.n_points);
    rep.set_param("quadrature_fallback", fallback ? 1.0 : 0.0);
    if (fallback) rep.notes.push_back("closed-form drift missing; quadrature fallback used");

    const double c = C(0, 0);
    struct Point {
        double u, lhs, rhs;
        bool ok;
    };
    std::vector<Point> pts;
    bool all_ok = true;
    for (double u : grid_points(grid)) {
        const double gamma = model.gamma_matrix(ParamVec{u}).scalar();
        const double b = drift_fn(u);
        const double lhs = c * u * (b / gamma);
        const double rhs = -0.5 * c * u * u;
        const bool ok = lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
        all_ok = all_ok && ok;
        pts.push_back({u, lhs, rhs, ok});
    }

    // Largest symmetric interval around 0 on which the inequality holds.
    std::vector<Point> by_radius = pts;
    std::sort(by_radius.begin(), by_radius.end(),
              [](const Point& a, const Point& b) { return std::abs(a.u) < std::abs(b.u); });
    double largest = 0.0;
    for (const auto& p : by_radius) {
        if (!p.ok) break;
        largest = std::abs(p.u);
    }
    rep.set_param("holds_radius", largest);
    rep.region = format_interval(largest);
    rep.verdict = all_ok;

    const std::size_t stride = witness_stride(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (i % stride == 0 || !pts[i].ok)
            rep.witnesses.push_back({pts[i].u, pts[i].lhs, pts[i].rhs, pts[i].ok});
    return rep;
}

ConditionReport check_B2(const models::IidModel& model, const GridSpec& grid, double bound) {
    require_scalar_model(model, "check_B2");
    auto [m2_fn, fallback] = iid_second_moment_fn(model);

    ConditionReport rep;
    rep.condition = "B2";
    rep.model = model.id;
    rep.set_param("bound", bound);
    rep.set_param("grid_lo", grid.lo);
    rep.set_param("grid_hi", grid.hi);
    rep.set_param("grid_n", grid.n_points);
    rep.set_param("quadrature_fallback", fallback ? 1.0 : 0.0);

    double sup = 0.0;
    double arg_sup = 0.0;
    double at_origin = 0.0;
    double origin_dist = std::numeric_limits<double>::infinity();
    bool finite = true;
    const auto pts = grid_points(grid);
    std::vector<Witness> ws;
    for (double u : pts) {
        const double gamma = model.gamma_matrix(ParamVec{u}).scalar();
        const double val = m2_fn(u) / (gamma * gamma);
        if (!std::isfinite(val)) finite = false;
        if (val > sup) {
            sup = val;
            arg_sup = u;
        }
        if (std::abs(u) < origin_dist) {
            origin_dist = std::abs(u);
            at_origin = val;
        }
        ws.push_back({u, val, bound, val <= bound});
    }
    rep.set_param("sup", sup);
    rep.set_param("arg_sup", arg_sup);
    rep.set_param("value_near_origin", at_origin);
    rep.verdict = finite && sup <= bound;
    rep.region = format_interval(std::max(std::abs(grid.lo), std::abs(grid.hi)));
    const std::size_t stride = witness_stride(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
        if (i % stride == 0 || !ws[i].ok) rep.witnesses.push_back(ws[i]);
    return rep;
}

StabilityResult estimate_B_matrix(const models::IidModel& model, double fd_step) {
    if (!model.drift) throw MissingDriftError("estimate_B_matrix: closed-form drift required");
    if (!(fd_step > 0.0)) throw std::invalid_argument("estimate_B_matrix: fd_step must be positive");
    const int m = model.dim;

    auto R = [&model](const ParamVec& u) {
        return invert(model.gamma_matrix(u)).inverse.apply(model.drift(u));
    };

    StabilityResult out;
    out.B = SquareMatrix(m);
    for (int j = 0; j < m; ++j) {
        ParamVec up(m), dn(m);
        up[j] = fd_step;
        dn[j] = -fd_step;
        const ParamVec rp = R(up);
        const ParamVec rn = R(dn);
        for (int i = 0; i < m; ++i) out.B(i, j) = (rp[i] - rn[i]) / (2.0 * fd_step);
    }
    out.S = out.B;
    for (int i = 0; i < m; ++i) out.S(i, i) += 0.5;

    if (m == 1) {
        out.max_real_eigenvalue = out.S(0, 0);
        out.stable = out.max_real_eigenvalue < 0.0;
    } else if (m == 2) {
        const double tr = out.S(0, 0) + out.S(1, 1);
        const double det = out.S(0, 0) * out.S(1, 1) - out.S(0, 1) * out.S(1, 0);
        const double disc = tr * tr - 4.0 * det;
        out.max_real_eigenvalue = disc >= 0.0 ? 0.5 * (tr + std::sqrt(disc)) : 0.5 * tr;
        out.stable = out.max_real_eigenvalue < 0.0;
    } else {
        // Gershgorin upper bound on real parts: sufficient for stability only.
        double upper = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            double radius = 0.0;
            for (int j = 0; j < m; ++j)
                if (j != i) radius += std::abs(out.S(i, j));
            upper = std::max(upper, out.S(i, i) + radius);
        }
        out.max_real_eigenvalue = upper;
        out.stable = upper < 0.0;
        out.sufficient_only = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// (M1)-(M3)
// ---------------------------------------------------------------------------

ConditionReport check_M_conditions(const models::AdditiveExpFamily& fam, const GridSpec& grid,
                                   const Trajectory& trajectory, const MThresholds& thr) {
    ConditionReport rep;
    rep.condition = "M";
    rep.model = fam.id;
    rep.set_param("grid_lo", grid.lo);
    rep.set_param("grid_hi", grid.hi);
    rep.set_param("m1_threshold", thr.m1_tail_max);

    // Linear-gdot branch of the proposition: gddot constant on the grid.
    const auto pts = grid_points(grid);
    double gdd_min = std::numeric_limits<double>::infinity();
    double gdd_max = -std::numeric_limits<double>::infinity();
    double m3_B = 0.0;
    for (double u : pts) {
        const double gdd = fam.gddot(u);
        const double gd = fam.gdot(u);
        gdd_min = std::min(gdd_min, gdd);
        gdd_max = std::max(gdd_max, gdd);
        const double ratio = (1.0 + gd * gd) / (gdd * gdd) / (1.0 + u * u);
        m3_B = std::max(m3_B, ratio);
        rep.witnesses.push_back({u, ratio, 0.0, std::isfinite(ratio)});
    }
    const bool linear_gdot = gdd_max - gdd_min <= 1e-12 * std::max(1.0, std::abs(gdd_max));
    rep.set_param("linear_gdot", linear_gdot ? 1.0 : 0.0);
    if (linear_gdot)
        rep.notes.push_back("gdot linear on the grid: consistency holds by the linear branch; "
                            "M-checks reported informationally");

    // M1 along the trajectory: tail max of h(X_{t-1})/H_t over the last quartile.
    if (trajectory.steps.empty())
        throw std::invalid_argument("check_M_conditions: trajectory must be nonempty for M1");
    std::vector<double> m1_values;
    double H = 0.0;
    double x_prev = trajectory.x0;
    long zero_H = 0;
    for (const auto& s : trajectory.steps) {
        H += fam.h(x_prev);
        if (H > 0.0)
            m1_values.push_back(fam.h(x_prev) / H);
        else
            ++zero_H;
        x_prev = s.x;
    }
    const double m1_tail = m1_values.empty() ? std::numeric_limits<double>::infinity()
                                             : last_quartile_max(m1_values);
    const bool m1_ok = m1_tail < thr.m1_tail_max;
    rep.set_param("M1_tail_max", m1_tail);
    rep.set_param("M1_skipped_zero_H", static_cast<double>(zero_H));
    rep.set_param("M1_verdict", m1_ok ? 1.0 : 0.0);

    // M2 on [grid.lo, grid.hi].
    const bool m2_ok = gdd_min > 0.0 && std::isfinite(gdd_max);
    rep.set_param("M2_inf", gdd_min);
    rep.set_param("M2_sup", gdd_max);
    rep.set_param("M2_verdict", m2_ok ? 1.0 : 0.0);

    // M3: smallest constant B on the grid; verdict = finite.
    const bool m3_ok = std::isfinite(m3_B);
    rep.set_param("M3_B", m3_B);
    rep.set_param("M3_verdict", m3_ok ? 1.0 : 0.0);

    rep.verdict = linear_gdot || (m1_ok && m2_ok && m3_ok);
    rep.region = format_interval(std::max(std::abs(grid.lo), std::abs(grid.hi)));
    return rep;
}

// ---------------------------------------------------------------------------
// K-trace
// ---------------------------------------------------------------------------

std::vector<double> a_series_for(const EstimatingScheme& scheme, const Trajectory& trajectory,
                                 ASeries choice) {
    std::vector<double> a;
    a.reserve(trajectory.steps.size());
    if (choice == ASeries::StepCount) {
        for (std::size_t i = 0; i < trajectory.steps.size(); ++i)
            a.push_back(static_cast<double>(i + 1));
        return a;
    }
    History hist;
    hist.x0 = trajectory.x0;
    double w = 0.0;
    for (const auto& s : trajectory.steps) {
        w += scheme.weight(hist);
        a.push_back(w);
        hist.xs.push_back(s.x);
    }
    return a;
}

KTrace k_trace(const EstimatingScheme& scheme, const Trajectory& trajectory, const SquareMatrix& C,
               std::span<const double> a_series, double delta) {
    if (!scheme.has_closed_moments())
        throw MissingDriftError("k_trace: scheme lacks closed-form drift/second moment");
    if (C.dim() != scheme.dim) throw std::invalid_argument("k_trace: C dimension mismatch");
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("k_trace: delta must lie in [0, 1/2)");
    if (a_series.size() != trajectory.steps.size())
        throw std::invalid_argument("k_trace: a_series length mismatch");

    KTrace trace;
    trace.delta = delta;
    trace.rows.reserve(trajectory.steps.size());

    History hist;
    hist.x0 = trajectory.x0;
    double w = 0.0;
    ParamVec theta_prev = trajectory.theta0;
    const ParamVec& theta = trajectory.theta_true;
    double premise_sum = 0.0;
    const double two_delta = 2.0 * delta;

    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const auto& step_rec = trajectory.steps[i];
        const long t = static_cast<long>(i) + 1;
        w += scheme.weight(hist);

        const double a_t = a_series[i];
        const double a_prev = i == 0 ? 0.0 : a_series[i - 1];
        const double ca_t = std::pow(a_t, two_delta);
        const double ca_prev = std::pow(a_prev, two_delta);

        const ParamVec delta_prev = theta_prev - theta;
        const double quad = dot(C.apply(delta_prev), delta_prev);

        KTraceRow row;
        row.t = t;
        row.v_prev = ca_prev * quad;
        row.dv = (ca_t - ca_prev) * quad;

        const SquareMatrix gamma = scheme.gamma(theta_prev, w, hist);
        const auto inv = try_invert(gamma);
        if (!inv) {
            row.degenerate = true;
        } else {
            const ParamVec b = scheme.drift(theta, delta_prev, hist);
            const SquareMatrix m2 = scheme.psi_outer(theta, delta_prev, hist);
            const SquareMatrix& g = inv->inverse;
            row.drift = 2.0 * ca_t * dot(C.apply(delta_prev), g.apply(b));
            row.moment = ca_t * C.multiply(g.multiply(m2.multiply(g.transpose()))).trace();
        }
        row.k = row.dv + row.drift + row.moment;
        row.k_pos = positive_part(row.k);
        row.k_neg = negative_part(row.k);
        row.premise_increment = row.k_pos / (1.0 + row.v_prev);
        premise_sum += row.premise_increment;
        row.premise_partial_sum = premise_sum;

        const ParamVec delta_cur = step_rec.theta_hat - theta;
        row.v_cur = ca_t * dot(C.apply(delta_cur), delta_cur);

        trace.rows.push_back(row);
        hist.xs.push_back(step_rec.x);
        theta_prev = step_rec.theta_hat;
    }
    return trace;
}

// ---------------------------------------------------------------------------
// (R1)-(R3)
// ---------------------------------------------------------------------------

ConditionReport check_R_conditions(std::span<const double> a, std::span<const double> lambda,
                                   std::span<const double> P,
                                   std::span<const double> norm_second_moment, double epsilon,
                                   const RThresholds& thr) {
    const std::size_t n = a.size();
    if (lambda.size() != n || P.size() != n || norm_second_moment.size() != n)
        throw std::invalid_argument("check_R_conditions: series length mismatch");
    if (n == 0) throw std::invalid_argument("check_R_conditions: empty series");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("check_R_conditions: epsilon must lie in (0,1)");
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < 0.0 || (i > 0 && a[i] < a[i - 1]))
            throw std::invalid_argument("check_R_conditions: a must be non-negative, non-decreasing");
    }

    ConditionReport rep;
    rep.condition = "R";
    rep.set_param("epsilon", epsilon);
    rep.set_param("r1_threshold", thr.r1_tail_max);
    rep.set_param("plateau_frac", thr.plateau_frac);

    // (R1): tail of da_t / a_{t-1}.
    std::vector<double> r1_values;
    long r1_skipped = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (a[i - 1] > 0.0)
            r1_values.push_back((a[i] - a[i - 1]) / a[i - 1]);
        else
            ++r1_skipped;
    }
    const double r1_tail = r1_values.empty() ? std::numeric_limits<double>::infinity()
                                             : last_quartile_max(r1_values);
    const bool r1_ok = r1_tail < thr.r1_tail_max;
    rep.set_param("R1_tail_max", r1_tail);
    rep.set_param("R1_skipped", static_cast<double>(r1_skipped));
    rep.set_param("R1_verdict", r1_ok ? 1.0 : 0.0);

    // (R2): partial sums of [da_t/a_t - lambda_t]^+.
    std::vector<double> r2_inc(n, 0.0);
    long zero_a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] > 0.0) {
            const double da = a[i] - (i == 0 ? 0.0 : a[i - 1]);
            r2_inc[i] = positive_part(da / a[i] - lambda[i]);
        } else {
            ++zero_a;
        }
    }
    const auto r2_partial = prefix_sums(r2_inc);
    const auto r2_plateau = plateau_check(r2_partial, thr.plateau_frac);
    rep.set_param("R2_total", r2_plateau.total);
    rep.set_param("R2_last_quartile_fraction", r2_plateau.fraction);
    rep.set_param("R2_verdict", r2_plateau.plateaued ? 1.0 : 0.0);

    // (R3): partial sums of a_t^eps [m2 - P]^+.
    std::vector<double> r3_inc(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] > 0.0)
            r3_inc[i] = std::pow(a[i], epsilon) * positive_part(norm_second_moment[i] - P[i]);
    const auto r3_partial = prefix_sums(r3_inc);
    const auto r3_plateau = plateau_check(r3_partial, thr.plateau_frac);
    rep.set_param("R3_total", r3_plateau.total);
    rep.set_param("R3_last_quartile_fraction", r3_plateau.fraction);
    rep.set_param("R3_verdict", r3_plateau.plateaued ? 1.0 : 0.0);
    rep.set_param("zero_a_entries", static_cast<double>(zero_a));

    rep.verdict = r1_ok && r2_plateau.plateaued && r3_plateau.plateaued;
    rep.region = "t = 1.." + std::to_string(n);

    const std::size_t stride = witness_stride(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i % stride == 0)
            rep.witnesses.push_back({static_cast<double>(i + 1), r2_partial[i], r3_partial[i], true});
    return rep;
}

RSeriesInput build_r_series_additive(const models::AdditiveExpFamily& fam,
                                     const Trajectory& trajectory, double eps_tilde) {
    if (!(eps_tilde > 0.0 && eps_tilde < 0.5))
        throw std::invalid_argument("build_r_series_additive: eps_tilde must lie in (0, 1/2)");
    RSeriesInput out;
    const std::size_t n = trajectory.steps.size();
    out.a.reserve(n);
    out.lambda.reserve(n);
    out.P.reserve(n);
    out.norm_second_moment.reserve(n);

    const double theta = trajectory.theta_true.scalar();
    double theta_prev = trajectory.theta0.scalar();
    double x_prev = trajectory.x0;
    double H = 0.0;
    for (const auto& s : trajectory.steps) {
        const double h = fam.h(x_prev);
        H += h;
        const double u = theta_prev - theta;
        const double b = additive_b(fam, theta, u, x_prev);
        const double gdd_u = fam.gddot(theta + u);
        out.a.push_back(H);
        if (H > 0.0) {
            const double r = h / H;
            out.lambda.push_back(2.0 * (1.0 - eps_tilde) * r -
                                 (1.0 + eps_tilde) * (1.0 + eps_tilde) * r * r);
            const double denom = H * gdd_u;
            out.P.push_back((b / denom) * (b / denom));
            out.norm_second_moment.push_back((fam.gddot(theta) * h + b * b) / (denom * denom));
        } else {
            out.lambda.push_back(0.0);
            out.P.push_back(0.0);
            out.norm_second_moment.push_back(0.0);
        }
        x_prev = s.x;
        theta_prev = s.theta_hat.scalar();
    }
    return out;
}

RSeriesInput build_r_series_iid(const models::IidModel& model, const Trajectory& trajectory) {
    require_scalar_model(model, "build_r_series_iid");
    if (!model.second_moment)
        throw MissingDriftError("build_r_series_iid: closed-form second moment required");
    RSeriesInput out;
    const std::size_t n = trajectory.steps.size();
    const double theta = trajectory.theta_true.scalar();
    double theta_prev = trajectory.theta0.scalar();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);
        const double u = theta_prev - theta;
        const double gamma = model.gamma_matrix(ParamVec{theta_prev}).scalar();
        const double m2 = model.second_moment(ParamVec{u}).scalar();
        out.a.push_back(t);
        out.lambda.push_back(1.0 / t);
        out.P.push_back(0.0);
        out.norm_second_moment.push_back(m2 / (t * gamma * t * gamma));
        theta_prev = trajectory.steps[i].theta_hat.scalar();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Script-N and the G-trace
// ---------------------------------------------------------------------------

double script_N(const models::AdditiveExpFamily& fam, double theta, double u, double h_prev,
                double H_t) {
    if (!(H_t > 0.0)) throw std::invalid_argument("script_N: H_t must be positive");
    const double gdd_u = fam.gddot(theta + u);
    const double second = h_prev / (H_t * H_t) * fam.gddot(theta) / (gdd_u * gdd_u);
    if (u == 0.0) return second;  // 0/0 convention: the first term vanishes
    const double d = fam.gdot(theta) - fam.gdot(theta + u);
    const double r = h_prev / H_t;
    const double first = r * (d / gdd_u) * u * (2.0 + r * d / (u * gdd_u));
    return first + second;
}

ConditionReport check_G_conditions(const models::AdditiveExpFamily& fam,
                                   const Trajectory& trajectory, double epsilon,
                                   const GThresholds& thr) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("check_G_conditions: epsilon must lie in (0,1)");
    if (trajectory.steps.empty())
        throw std::invalid_argument("check_G_conditions: empty trajectory");

    const double theta = trajectory.theta_true.scalar();

    // u-grid over eps <= |u| <= 1/eps, both signs.
    std::vector<double> us;
    const int per_side = std::max(2, thr.grid_points_per_side);
    const double u_hi = 1.0 / epsilon;
    for (int i = 0; i < per_side; ++i) {
        const double u = epsilon + (u_hi - epsilon) * i / (per_side - 1);
        us.push_back(u);
        us.push_back(-u);
    }

    std::vector<double> g2_inc;
    std::vector<double> g3_inc;
    std::vector<double> gr1_min_per_t;
    double theta_prev = trajectory.theta0.scalar();
    double x_prev = trajectory.x0;
    double H = 0.0;
    long skipped = 0;
    for (const auto& s : trajectory.steps) {
        const double h = fam.h(x_prev);
        H += h;
        if (H > 0.0) {
            // (G3): premise increment at the realized perturbation.
            const double u_hat = theta_prev - theta;
            const double n_hat = script_N(fam, theta, u_hat, h, H);
            g3_inc.push_back(positive_part(n_hat) / (1.0 + u_hat * u_hat));

            // (G2): inf over the grid of the negative part, plus the Gr1 bracket.
            double inf_neg = std::numeric_limits<double>::infinity();
            double min_bracket = std::numeric_limits<double>::infinity();
            for (double u : us) {
                inf_neg = std::min(inf_neg, negative_part(script_N(fam, theta, u, h, H)));
                const double d = fam.gdot(theta) - fam.gdot(theta + u);
                min_bracket =
                    std::min(min_bracket, 2.0 + (h / H) * d / (u * fam.gddot(theta + u)));
            }
            g2_inc.push_back(inf_neg);
            gr1_min_per_t.push_back(min_bracket);
        } else {
            ++skipped;
        }
        x_prev = s.x;
        theta_prev = s.theta_hat.scalar();
    }

    ConditionReport rep;
    rep.condition = "G";
    rep.model = fam.id;
    rep.set_param("epsilon", epsilon);
    rep.set_param("plateau_frac", thr.plateau_frac);
    rep.set_param("skipped_zero_H", static_cast<double>(skipped));

    const auto g3_partial = prefix_sums(g3_inc);
    const auto g3_plateau = plateau_check(g3_partial, thr.plateau_frac);
    rep.set_param("G3_total", g3_plateau.total);
    rep.set_param("G3_last_quartile_fraction", g3_plateau.fraction);
    rep.set_param("G3_verdict", g3_plateau.plateaued ? 1.0 : 0.0);

    const auto g2_partial = prefix_sums(g2_inc);
    const auto g2_plateau = plateau_check(g2_partial, thr.plateau_frac);
    const bool g2_diverging = !g2_plateau.plateaued && g2_plateau.total > 0.0;
    rep.set_param("G2_total", g2_plateau.total);
    rep.set_param("G2_last_quartile_fraction", g2_plateau.fraction);
    rep.set_param("G2_verdict", g2_diverging ? 1.0 : 0.0);
    rep.notes.push_back("G2 divergence is a per-trajectory check; the "
                        "positive-probability quantifier behind it is not observable from one path");

    double gr1_tail_min = std::numeric_limits<double>::infinity();
    if (!gr1_min_per_t.empty()) {
        const std::size_t m = gr1_min_per_t.size();
        std::size_t start = m - m / 4;
        if (start == m) start = m - 1;
        for (std::size_t i = start; i < m; ++i)
            gr1_tail_min = std::min(gr1_tail_min, gr1_min_per_t[i]);
    }
    const bool gr1_ok = gr1_tail_min >= 1.0 - 1e-12;
    rep.set_param("Gr1_tail_min", gr1_tail_min);
    rep.set_param("Gr1_verdict", gr1_ok ? 1.0 : 0.0);

    rep.verdict = g3_plateau.plateaued && g2_diverging && gr1_ok;
    rep.region = "t = 1.." + std::to_string(trajectory.steps.size());
    const std::size_t stride = witness_stride(g2_partial.size());
    for (std::size_t i = 0; i < g2_partial.size(); ++i)
        if (i % stride == 0)
            rep.witnesses.push_back(
                {static_cast<double>(i + 1), g2_partial[i], g3_partial[i], true});
    return rep;
}

// ---------------------------------------------------------------------------
// Robbins-Siegmund monitor
// ---------------------------------------------------------------------------

RobbinsSiegmundReport robbins_siegmund_monitor(std::span<const double> X,
                                               std::span<const double> beta,
                                               std::span<const double> xi,
                                               std::span<const double> zeta, double plateau_frac,
                                               double x_range_frac) {
    const std::size_t n = X.size();
    if (beta.size() != n || xi.size() != n || zeta.size() != n)
        throw std::invalid_argument("robbins_siegmund_monitor: series length mismatch");
    if (n == 0) throw std::invalid_argument("robbins_siegmund_monitor: empty series");
    for (std::size_t i = 0; i < n; ++i)
        if (X[i] < 0.0 || beta[i] < 0.0 || xi[i] < 0.0 || zeta[i] < 0.0)
            throw std::invalid_argument("robbins_siegmund_monitor: series must be non-negative");

    RobbinsSiegmundReport rep;
    rep.beta_partial = prefix_sums(beta);
    rep.xi_partial = prefix_sums(xi);
    rep.zeta_partial = prefix_sums(zeta);
    rep.beta_plateau = plateau_check(rep.beta_partial, plateau_frac).plateaued;
    rep.xi_plateau = plateau_check(rep.xi_partial, plateau_frac).plateaued;
    rep.zeta_plateau = plateau_check(rep.zeta_partial, plateau_frac).plateaued;
    rep.premise_satisfied = rep.beta_plateau && rep.xi_plateau;

    const auto range = last_quartile_range_check(X, x_range_frac);
    rep.x_last_quartile_range = range.last_quartile_range;
    rep.x_running_max = range.running_max;
    rep.x_converges = range.stable;
    return rep;
}

// ---------------------------------------------------------------------------
// Proposition A2 sums
// ---------------------------------------------------------------------------

PropA2Sums prop_A2_sums(std::span<const double> d, double epsilon) {
    if (d.size() < 2) throw std::invalid_argument("prop_A2_sums: need at least d_0, d_1");
    if (!(d[0] > 0.0)) throw std::invalid_argument("prop_A2_sums: d_0 must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("prop_A2_sums: epsilon must be positive");
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i] < d[i - 1]) throw std::invalid_argument("prop_A2_sums: d must be non-decreasing");

    PropA2Sums out;
    out.bound = 1.0 / (epsilon * std::pow(d[0], epsilon));
    out.sum1.reserve(d.size() - 1);
    out.sum2.reserve(d.size() - 1);
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        const double dd = d[i] - d[i - 1];
        s1 += dd / d[i];
        s2 += dd / std::pow(d[i], 1.0 + epsilon);
        out.sum1.push_back(s1);
        out.sum2.push_back(s2);
    }
    out.bound_satisfied = s2 <= out.bound;
    return out;
}

} // namespace recest::diag
