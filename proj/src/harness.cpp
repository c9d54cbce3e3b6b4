#include "recest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "recest/errors.hpp"
#include "recest/models.hpp"
#include "recest/rng.hpp"
#include "recest/series.hpp"

namespace recest::harness {

void validate_config(const MonteCarloConfig& cfg, const EstimatingScheme& scheme) {
    if (cfg.reps < 1) throw std::invalid_argument("MonteCarloConfig: reps must be >= 1");
    if (cfg.t_max < 1) throw std::invalid_argument("MonteCarloConfig: t_max must be >= 1");
    if (cfg.checkpoints.empty())
        throw std::invalid_argument("MonteCarloConfig: at least one checkpoint required");
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        const long c = cfg.checkpoints[i];
        if (c < 1 || c > cfg.t_max)
            throw std::invalid_argument("MonteCarloConfig: checkpoint outside [1, t_max]");
        if (i > 0 && c <= cfg.checkpoints[i - 1])
            throw std::invalid_argument("MonteCarloConfig: checkpoints must be increasing and unique");
    }
    if (!(cfg.delta > 0.0 && cfg.delta < 0.5))
        throw std::invalid_argument("MonteCarloConfig: delta must lie in ]0, 1/2[");
    if (cfg.theta_true.dim() != scheme.dim || cfg.theta0.dim() != scheme.dim)
        throw std::invalid_argument("MonteCarloConfig: parameter dimension mismatch");
    if (scheme.id == "ar1" && std::abs(cfg.theta_true[0]) > 1.0 && cfg.t_max > cfg.explosive_t_cap)
        throw std::invalid_argument(
            "MonteCarloConfig: explosive AR(1) runs are capped at t_max = " +
            std::to_string(cfg.explosive_t_cap) + " (I_t overflows double precision)");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RECEST_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

std::vector<CheckpointStat> run_one_rep(const EstimatingScheme& scheme,
                                        const MonteCarloConfig& cfg, int rep) {
    TrajectoryRunner runner(scheme, cfg.theta_true, cfg.theta0,
                            replication_seed(cfg.master_seed, static_cast<std::uint64_t>(rep)));
    std::vector<CheckpointStat> stats;
    stats.reserve(cfg.checkpoints.size());
    std::size_t next_ck = 0;
    for (long t = 1; t <= cfg.t_max && next_ck < cfg.checkpoints.size(); ++t) {
        runner.advance();
        if (t == cfg.checkpoints[next_ck]) {
            const auto& st = runner.state();
            CheckpointStat s;
            s.t = t;
            s.delta_norm = (st.theta_hat - cfg.theta_true).norm();
            s.a_value = cfg.a_choice == AChoice::StepCount ? static_cast<double>(t) : st.weight_sum;
            s.info = scheme.dim == 1 ? st.normalizer.scalar() : st.normalizer.trace();
            stats.push_back(s);
            ++next_ck;
        }
    }
    return stats;
}

} // namespace

Ensemble run_monte_carlo(const EstimatingScheme& scheme, const MonteCarloConfig& cfg) {
    validate_config(cfg, scheme);
    Ensemble ens;
    ens.cfg = cfg;
    ens.scheme_id = scheme.id;
    ens.reps.resize(static_cast<std::size_t>(cfg.reps));

    const int n_threads = std::min(resolve_threads(cfg.threads), cfg.reps);
    if (n_threads <= 1) {
        for (int r = 0; r < cfg.reps; ++r)
            ens.reps[static_cast<std::size_t>(r)] = run_one_rep(scheme, cfg, r);
        return ens;
    }

    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int tid = 0; tid < n_threads; ++tid) {
        pool.emplace_back([&, tid] {
            try {
                for (int r = tid; r < cfg.reps; r += n_threads)
                    ens.reps[static_cast<std::size_t>(r)] = run_one_rep(scheme, cfg, r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return ens;
}

namespace {

double checkpoint_ratio(const CheckpointStat& s, const std::string& kind, double theta) {
    if (kind == "I_over_t") return s.info / static_cast<double>(s.t);
    const double log_kappa = models::fisher_rate_log_kappa(theta, s.t);
    if (kind == "I_over_kappa_log") return std::exp(std::log(s.info) - log_kappa);
    return s.info / models::fisher_rate_kappa(theta, s.t);
}

std::string ratio_kind_for(const Ensemble& ens) {
    if (ens.scheme_id == "ar1" && ens.cfg.theta_true.dim() == 1) {
        const double theta = std::abs(ens.cfg.theta_true[0]);
        if (theta > 1.0) return "I_over_kappa_log";
        if (theta == 1.0) return "I_over_kappa";
    }
    return "I_over_t";
}

} // namespace

std::vector<std::vector<double>> ensemble_ratios(const Ensemble& ens, std::string* kind_out) {
    const std::string kind = ratio_kind_for(ens);
    if (kind_out) *kind_out = kind;
    const double theta = ens.cfg.theta_true.dim() == 1 ? ens.cfg.theta_true[0] : 0.0;
    std::vector<std::vector<double>> out(ens.reps.size());
    for (std::size_t r = 0; r < ens.reps.size(); ++r) {
        out[r].reserve(ens.reps[r].size());
        for (const auto& s : ens.reps[r]) out[r].push_back(checkpoint_ratio(s, kind, theta));
    }
    return out;
}

RateReport estimate_rate(const Ensemble& ens) {
    const std::size_t n_reps = ens.reps.size();
    const std::size_t n_ck = ens.cfg.checkpoints.size();
    if (n_reps < 30)
        throw InsufficientDataError("estimate_rate: need >= 30 replications");
    if (n_ck < 3) throw InsufficientDataError("estimate_rate: need >= 3 checkpoints");
    for (const auto& row : ens.reps)
        if (row.size() != n_ck)
            throw InsufficientDataError("estimate_rate: incomplete replication rows");

    RateReport rep;
    rep.checkpoints = ens.cfg.checkpoints;
    rep.delta = ens.cfg.delta;
    const auto ratios = ensemble_ratios(ens, &rep.ratio_kind);

    for (std::size_t c = 0; c < n_ck; ++c) {
        std::vector<double> abs_err(n_reps), scaled(n_reps), ratio(n_reps);
        for (std::size_t r = 0; r < n_reps; ++r) {
            const auto& s = ens.reps[r][c];
            abs_err[r] = s.delta_norm;
            scaled[r] = std::pow(s.a_value, ens.cfg.delta) * s.delta_norm;
            ratio[r] = ratios[r][c];
        }
        rep.q25.push_back(quantile(abs_err, 0.25));
        rep.q50.push_back(quantile(abs_err, 0.50));
        rep.q75.push_back(quantile(abs_err, 0.75));
        rep.scaled_q25.push_back(quantile(scaled, 0.25));
        rep.scaled_q50.push_back(quantile(scaled, 0.50));
        rep.scaled_q75.push_back(quantile(scaled, 0.75));
        rep.ratio_median.push_back(quantile(ratio, 0.50));
    }

    // Least-squares fit of log median ||Delta|| on log t.
    std::vector<double> xs(n_ck), ys(n_ck);
    bool fit_ok = true;
    for (std::size_t c = 0; c < n_ck; ++c) {
        xs[c] = std::log(static_cast<double>(rep.checkpoints[c]));
        if (rep.q50[c] > 0.0)
            ys[c] = std::log(rep.q50[c]);
        else
            fit_ok = false;
    }
    if (fit_ok) {
        const double xbar = pairwise_sum(xs) / static_cast<double>(n_ck);
        const double ybar = pairwise_sum(ys) / static_cast<double>(n_ck);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t c = 0; c < n_ck; ++c) {
            sxx += (xs[c] - xbar) * (xs[c] - xbar);
            sxy += (xs[c] - xbar) * (ys[c] - ybar);
        }
        rep.slope = sxy / sxx;
        if (n_ck > 2) {
            double ss_res = 0.0;
            for (std::size_t c = 0; c < n_ck; ++c) {
                const double fit = ybar + rep.slope * (xs[c] - xbar);
                ss_res += (ys[c] - fit) * (ys[c] - fit);
            }
            rep.slope_stderr = std::sqrt(ss_res / static_cast<double>(n_ck - 2) / sxx);
        }
    } else {
        rep.slope = std::numeric_limits<double>::quiet_NaN();
        rep.slope_stderr = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

OlsSeries ar1_batch_ols(const Trajectory& trajectory) {
    OlsSeries out;
    out.theta_star.reserve(trajectory.steps.size());
    double x_prev = trajectory.x0;
    double cross = 0.0;  // sum X_s X_{s-1}
    double info = 0.0;   // sum X_{s-1}^2
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const double x = trajectory.steps[i].x;
        cross += x * x_prev;
        info += x_prev * x_prev;
        if (info > 0.0) {
            if (out.t0 < 0) out.t0 = static_cast<long>(i) + 1;
            out.theta_star.push_back(cross / info);
        } else {
            out.theta_star.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        x_prev = x;
    }
    return out;
}

RatioSeries ergodic_ratio_series(const Ensemble& ens, double theta) {
    if (std::abs(theta) == 1.0)
        throw std::invalid_argument("ergodic_ratio_series: no ratio choice applies at |theta| = 1");
    RatioSeries out;
    out.log_space = std::abs(theta) > 1.0;
    const std::size_t n_ck = ens.cfg.checkpoints.size();
    for (std::size_t c = 0; c < n_ck; ++c) {
        std::vector<double> vals;
        vals.reserve(ens.reps.size());
        for (const auto& row : ens.reps) {
            const auto& s = row[c];
            if (out.log_space)
                vals.push_back(std::exp(std::log(s.info) - models::fisher_rate_log_kappa(theta, s.t)));
            else
                vals.push_back(s.info / static_cast<double>(s.t));
        }
        out.t.push_back(ens.cfg.checkpoints[c]);
        out.median.push_back(quantile(vals, 0.5));
    }
    return out;
}

StabilizationResult explosive_stabilization(const Ensemble& ens, double theta, long t_early,
                                            long t_late, double tol) {
    const auto& cks = ens.cfg.checkpoints;
    const auto it_e = std::find(cks.begin(), cks.end(), t_early);
    const auto it_l = std::find(cks.begin(), cks.end(), t_late);
    if (it_e == cks.end() || it_l == cks.end())
        throw std::invalid_argument("explosive_stabilization: checkpoints missing from ensemble");
    const std::size_t ce = static_cast<std::size_t>(it_e - cks.begin());
    const std::size_t cl = static_cast<std::size_t>(it_l - cks.begin());

    StabilizationResult res;
    res.t_early = t_early;
    res.t_late = t_late;
    for (const auto& row : ens.reps) {
        const double lr_e = std::log(row[ce].info) - models::fisher_rate_log_kappa(theta, t_early);
        const double lr_l = std::log(row[cl].info) - models::fisher_rate_log_kappa(theta, t_late);
        const double change = std::abs(std::exp(lr_l - lr_e) - 1.0);
        ++res.n_total;
        if (change < tol) ++res.n_stable;
    }
    res.fraction = res.n_total > 0 ? static_cast<double>(res.n_stable) / res.n_total : 0.0;
    return res;
}

} // namespace recest::harness
