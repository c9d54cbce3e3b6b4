// Acceptance suite: every release criterion in one binary, one pass/fail
// line each. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "recest/diagnostics.hpp"
#include "recest/harness.hpp"
#include "recest/models.hpp"
#include "recest/quadrature.hpp"
#include "recest/rng.hpp"
#include "recest/series.hpp"

using namespace recest;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Quadrature agrees with the closed-form drift and second moment on a
//    41-point grid over u in [-5, 5], within 1e-6, in under 2 seconds.
void criterion_oracles() {
    const auto start = std::chrono::steady_clock::now();
    double worst_b = 0.0, worst_m2 = 0.0;
    for (int i = 0; i < 41; ++i) {
        const double u = -5.0 + 0.25 * i;
        const double b_quad = diag::integrate_real_line(
            [u](double x) { return models::cauchy_psi(u, x) * models::cauchy_density(0.0, x); },
            1e-8);
        const double m2_quad = diag::integrate_real_line(
            [u](double x) {
                const double p = models::cauchy_psi(u, x);
                return p * p * models::cauchy_density(0.0, x);
            },
            1e-8);
        worst_b = std::max(worst_b, std::abs(b_quad - models::cauchy_b(u)));
        worst_m2 = std::max(worst_m2, std::abs(m2_quad - models::cauchy_second_moment(u)));
    }
    const double elapsed = seconds_since(start);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "max |quad-closed|: drift %.2e, second moment %.2e; %.2f s", worst_b, worst_m2,
                  elapsed);
    report(1, "Cauchy integral oracles (41 points, tol 1e-6, < 2 s)",
           worst_b <= 1e-6 && worst_m2 <= 1e-6 && elapsed < 2.0, detail);
}

// 2. The B1 checker passes on |u| <= 1.9 with C = 1 and flags u = 3
//    (analytic boundary u^2 = 4).
void criterion_b1_region() {
    const auto model = models::cauchy_model();
    const auto inside = diag::check_B1(model, SquareMatrix{{1.0}}, diag::GridSpec{-1.9, 1.9, 39});
    const auto outside = diag::check_B1(model, SquareMatrix{{1.0}}, diag::GridSpec{-3.0, 3.0, 7});
    bool witness_ok = false;
    for (const auto& w : outside.witnesses)
        if (w.where == 3.0 && !w.ok && std::abs(w.lhs - (-36.0 / 13.0)) < 1e-12 &&
            std::abs(w.rhs - (-4.5)) < 1e-12)
            witness_ok = true;
    char detail[160];
    std::snprintf(detail, sizeof detail, "inside verdict %d (radius %.3g), u=3 violated %d",
                  inside.verdict ? 1 : 0, inside.param("holds_radius"), witness_ok ? 1 : 0);
    report(2, "B1 holds on |u| <= 1.9 and fails at u = 3 (C = 1)",
           inside.verdict && !outside.verdict && witness_ok, detail);
}

// 3. Cauchy rate: 500 replications to t = 1e4; the medians of t^0.4 |error|
//    strictly decrease across the half-decade checkpoints and the log-log
//    slope of the median error lies in [-0.6, -0.4].
harness::RateReport cauchy_rate_report() {
    harness::MonteCarloConfig cfg;
    cfg.reps = 500;
    cfg.t_max = 10000;
    cfg.checkpoints = {100, 316, 1000, 3162, 10000};
    cfg.master_seed = 42;
    cfg.theta_true = ParamVec{1.0};
    cfg.theta0 = ParamVec{0.0};
    cfg.delta = 0.4;
    cfg.a_choice = harness::AChoice::StepCount;
    const auto scheme = models::iid_scheme(models::cauchy_model());
    return harness::estimate_rate(harness::run_monte_carlo(scheme, cfg));
}

void criterion_cauchy_rate() {
    const auto rep = cauchy_rate_report();
    bool decreasing = true;
    for (std::size_t c = 1; c < rep.scaled_q50.size(); ++c)
        if (!(rep.scaled_q50[c] < rep.scaled_q50[c - 1])) decreasing = false;
    const bool slope_ok = rep.slope >= -0.6 && rep.slope <= -0.4;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "scaled medians %.3f %.3f %.3f %.3f %.3f; slope %.4f (se %.4f)",
                  rep.scaled_q50[0], rep.scaled_q50[1], rep.scaled_q50[2], rep.scaled_q50[3],
                  rep.scaled_q50[4], rep.slope, rep.slope_stderr);
    report(3, "Cauchy rate: t^0.4-scaled medians decrease, slope in [-0.6, -0.4]",
           decreasing && slope_ok, detail);
}

// 4. AR(1) recursive estimate vs batch least squares: the scaled discrepancy
//    identity holds to 1e-10 relative on 100 random trajectories.
void criterion_ols_identity() {
    const auto scheme = models::additive_scheme(models::gaussian_ar1());
    int bad_trajectories = 0;
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const auto traj =
            run_trajectory(scheme, ParamVec{0.5}, ParamVec{0.0}, 1000, replication_seed(7, r));
        const auto ols = harness::ar1_batch_ols(traj);
        if (ols.t0 < 1) {
            ++bad_trajectories;
            continue;
        }
        // I_t series and the anchored discrepancy.
        double info = 0.0, x_prev = traj.x0;
        std::vector<double> info_series;
        for (const auto& s : traj.steps) {
            info += x_prev * x_prev;
            info_series.push_back(info);
            x_prev = s.x;
        }
        const std::size_t i0 = static_cast<std::size_t>(ols.t0) - 1;
        const double e0 = traj.steps[i0].theta_hat.scalar() - ols.theta_star[i0];
        bool ok = true;
        for (std::size_t i = i0; i < traj.steps.size(); ++i) {
            const double lhs = traj.steps[i].theta_hat.scalar() - ols.theta_star[i];
            const double rhs = info_series[i0] / info_series[i] * e0;
            const double scale = std::max({1.0, std::abs(traj.steps[i].theta_hat.scalar()),
                                           std::abs(ols.theta_star[i])});
            const double err = std::abs(lhs - rhs) / scale;
            worst = std::max(worst, err);
            if (err > 1e-10) ok = false;
        }
        if (!ok) ++bad_trajectories;
    }
    char detail[120];
    std::snprintf(detail, sizeof detail, "worst relative deviation %.2e over 100 trajectories",
                  worst);
    report(4, "AR(1) recursive/batch least-squares identity (1e-10 relative)",
           bad_trajectories == 0, detail);
}

// 5. Ergodic information ratio: 200 replications at theta = 0.5 put the
//    median I_t/t at t = 1e4 within 5% of 4/3; the AR(1) slope criterion
//    matches the Cauchy one.
void criterion_ergodic_ratio() {
    const auto scheme = models::additive_scheme(models::gaussian_ar1());
    harness::MonteCarloConfig cfg;
    cfg.reps = 200;
    cfg.t_max = 10000;
    cfg.checkpoints = {100, 316, 1000, 3162, 10000};
    cfg.master_seed = 43;
    cfg.theta_true = ParamVec{0.5};
    cfg.theta0 = ParamVec{0.0};
    cfg.a_choice = harness::AChoice::WeightSum;
    const auto ens = harness::run_monte_carlo(scheme, cfg);
    const auto ratio = harness::ergodic_ratio_series(ens, 0.5);
    const double target = 4.0 / 3.0;
    const double rel = std::abs(ratio.median.back() - target) / target;

    harness::MonteCarloConfig slope_cfg = cfg;
    slope_cfg.reps = 500;
    slope_cfg.master_seed = 42;
    const auto rep = harness::estimate_rate(harness::run_monte_carlo(scheme, slope_cfg));
    const bool slope_ok = rep.slope >= -0.6 && rep.slope <= -0.4;
    char detail[160];
    std::snprintf(detail, sizeof detail, "median I/t = %.5f (rel err %.3f%%), slope %.4f",
                  ratio.median.back(), rel * 100.0, rep.slope);
    report(5, "AR(1) ergodic ratio near 4/3 (5%) and slope in [-0.6, -0.4]",
           rel <= 0.05 && slope_ok, detail);
}

// 6. Explosive case theta = 1.2: the ratio I_t/kappa_t moves by < 1%
//    between t = 150 and t = 200 for at least 95% of 100 trajectories.
void criterion_explosive() {
    const auto scheme = models::additive_scheme(models::gaussian_ar1());
    harness::MonteCarloConfig cfg;
    cfg.reps = 100;
    cfg.t_max = 200;
    cfg.checkpoints = {150, 200};
    cfg.master_seed = 44;
    cfg.theta_true = ParamVec{1.2};
    cfg.theta0 = ParamVec{0.0};
    const auto ens = harness::run_monte_carlo(scheme, cfg);
    const auto res = harness::explosive_stabilization(ens, 1.2, 150, 200, 0.01);
    char detail[120];
    std::snprintf(detail, sizeof detail, "%d of %d trajectories stable (%.1f%%)", res.n_stable,
                  res.n_total, res.fraction * 100.0);
    report(6, "Explosive AR(1): I/kappa ratio stabilizes for >= 95% of runs",
           res.fraction >= 0.95, detail);
}

// 7. K-trace premise on 50 Cauchy trajectories (delta = 0.4, t = 1e3),
//    evaluated at the median across trajectories: premise partial sums gain
//    < 1% of their total over the last quartile and V_t = t^0.8 Delta_t^2
//    has last-quartile range < 10% of its running max.
void criterion_ktrace_premise() {
    const auto scheme = models::iid_scheme(models::cauchy_model());
    auto run_horizon = [&](long t_max, double& med_premise, double& med_vrange) {
        std::vector<double> premise_fracs, v_fracs;
        for (std::uint64_t r = 0; r < 50; ++r) {
            const auto traj = run_trajectory(scheme, ParamVec{1.0}, ParamVec{0.0}, t_max,
                                             replication_seed(42, r));
            const auto a = diag::a_series_for(scheme, traj, diag::ASeries::StepCount);
            const auto trace = diag::k_trace(scheme, traj, SquareMatrix{{1.0}}, a, 0.4);
            std::vector<double> premise, v;
            for (const auto& row : trace.rows) {
                premise.push_back(row.premise_partial_sum);
                v.push_back(row.v_cur);
            }
            premise_fracs.push_back(plateau_check(premise, 0.01).fraction);
            v_fracs.push_back(last_quartile_range_check(v, 0.1).fraction);
        }
        med_premise = quantile(premise_fracs, 0.5);
        med_vrange = quantile(v_fracs, 0.5);
    };
    double med_premise = 0.0, med_vrange = 0.0;
    run_horizon(1000, med_premise, med_vrange);
    const bool pass = med_premise < 0.01 && med_vrange < 0.10;
    char detail[240];
    double ref_premise = 0.0, ref_vrange = 0.0;
    run_horizon(10000, ref_premise, ref_vrange);
    std::snprintf(detail, sizeof detail,
                  "median premise increase %.2f%% (need < 1%%), median V range %.1f%% of max "
                  "(need < 10%%); same medians at t=1e4: %.2f%%, %.1f%%",
                  med_premise * 100.0, med_vrange * 100.0, ref_premise * 100.0,
                  ref_vrange * 100.0);
    report(7, "K-trace premise plateau and V stabilization (50 runs, t = 1e3)", pass, detail);
}

// 8. Series sums: for d_n = n+1 and eps = 1 the sum2 partials stay below the
//    bound 1 and land within 1e-3 of pi^2/6 - 1 at N = 1e6, while sum1
//    passes 8 by N = 1e4 and keeps growing.
void criterion_series_sums() {
    std::vector<double> d(1000001);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(i + 1);
    const auto sums = diag::prop_A2_sums(d, 1.0);
    bool below_bound = sums.bound == 1.0;
    for (double s : sums.sum2)
        if (s > sums.bound) below_bound = false;
    const double target = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
    const bool limit_ok = std::abs(sums.sum2.back() - target) <= 1e-3;
    const double sum1_at_1e4 = sums.sum1[9999];
    const bool growing = sum1_at_1e4 > 8.0 && sums.sum1.back() > sum1_at_1e4 + 1.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "sum2(1e6) = %.6f (target %.6f), sum1(1e4) = %.3f, sum1(1e6) = %.3f",
                  sums.sum2.back(), target, sum1_at_1e4, sums.sum1.back());
    report(8, "Series sums: bound 1/(eps d0^eps) respected, harmonic part grows",
           below_bound && limit_ok && growing, detail);
}

// 9. The rate command emits byte-identical reports for 1-thread and 4-thread
//    runs of the same seed.
void criterion_determinism() {
    cli::RateConfig cfg;
    cfg.model = "cauchy";
    cfg.reps = 50;
    cfg.t_max = 2000;
    cfg.checkpoints = {100, 316, 1000, 2000};
    cfg.seed = 42;
    cfg.threads = 1;
    std::string one, four;
    const int c1 = cli::run_rate(cfg, one);
    cfg.threads = 4;
    const int c4 = cli::run_rate(cfg, four);
    char detail[120];
    std::snprintf(detail, sizeof detail, "exit codes %d/%d, %zu bytes, equal %d", c1, c4,
                  one.size(), one == four ? 1 : 0);
    report(9, "Byte-identical rate reports across thread counts",
           c1 == 0 && c4 == 0 && !one.empty() && one == four, detail);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_oracles();
    criterion_b1_region();
    criterion_cauchy_rate();
    criterion_ols_identity();
    criterion_ergodic_ratio();
    criterion_explosive();
    criterion_ktrace_premise();
    criterion_series_sums();
    criterion_determinism();
    std::printf("%d of 9 criteria passed\n", 9 - g_failures);
    return g_failures;
}
