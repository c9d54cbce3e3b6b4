#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recest/linalg.hpp"
#include "recest/scheme.hpp"

namespace recest::harness {

/// Choice of the rate normalizer a_t: the step count t, or the scheme's
/// accumulated weight (H_t for additive families).
enum class AChoice { StepCount, WeightSum };

struct MonteCarloConfig {
    int reps = 100;
    long t_max = 1000;
    std::vector<long> checkpoints;  // increasing, unique, within [1, t_max]
    std::uint64_t master_seed = 0;
    ParamVec theta_true;
    ParamVec theta0;
    double delta = 0.4;             // in ]0, 1/2[
    AChoice a_choice = AChoice::StepCount;
    int threads = 0;                // 0: RECEST_THREADS env var, then hardware
    long explosive_t_cap = 500;     // |theta|>1 AR runs overflow past ~t=1000
};

/// Throws std::invalid_argument when the configuration violates any
/// precondition of run_monte_carlo.
void validate_config(const MonteCarloConfig& cfg, const EstimatingScheme& scheme);

struct CheckpointStat {
    long t = 0;
    double delta_norm = 0.0;  // ||theta_hat_t - theta_true||
    double a_value = 0.0;     // t or accumulated weight
    double info = 0.0;        // normalizer value at the checkpoint (I_t for built-ins)
};

struct Ensemble {
    MonteCarloConfig cfg;
    std::string scheme_id;
    std::vector<std::vector<CheckpointStat>> reps;  // [rep][checkpoint]
};

/// reps independent trajectories; replication r is seeded with
/// replication_seed(master_seed, r), so the ensemble is identical under any
/// thread count or execution order.
Ensemble run_monte_carlo(const EstimatingScheme& scheme, const MonteCarloConfig& cfg);

struct RateReport {
    std::vector<long> checkpoints;
    std::vector<double> q25, q50, q75;                       // of ||Delta_t||
    std::vector<double> scaled_q25, scaled_q50, scaled_q75;  // of a_t^delta ||Delta_t||
    std::vector<double> ratio_median;
    std::string ratio_kind;  // "I_over_t", "I_over_kappa_log", "I_over_kappa"
    double slope = 0.0;      // least-squares slope of log median ||Delta|| on log t
    double slope_stderr = 0.0;
    double delta = 0.0;
};

/// Requires >= 30 replications and >= 3 checkpoints (InsufficientDataError).
RateReport estimate_rate(const Ensemble& ensemble);

/// Per-replication ratio values in the order used by estimate_rate; exposed
/// for the raw CSV export.
std::vector<std::vector<double>> ensemble_ratios(const Ensemble& ensemble, std::string* kind_out);

struct OlsSeries {
    std::vector<double> theta_star;  // NaN while I_t = 0
    long t0 = -1;                    // first step with I_t > 0
};

/// Batch least squares theta*_t = (sum_{s<=t} X_s X_{s-1}) / I_t along an
/// AR(1) trajectory.
OlsSeries ar1_batch_ols(const Trajectory& trajectory);

struct RatioSeries {
    std::vector<long> t;
    std::vector<double> median;
    bool log_space = false;
};

/// Median I_t/t for |theta| < 1 or exp(log I_t - log kappa_t) for |theta| > 1.
/// theta = +-1 is rejected (no ratio choice applies there).
RatioSeries ergodic_ratio_series(const Ensemble& ensemble, double theta);

struct StabilizationResult {
    int n_total = 0;
    int n_stable = 0;
    double fraction = 0.0;
    long t_early = 0;
    long t_late = 0;
};

/// Fraction of trajectories whose I_t/kappa_t ratio moves by less than tol
/// (relative) between two checkpoints, computed in log space.
StabilizationResult explosive_stabilization(const Ensemble& ensemble, double theta, long t_early,
                                            long t_late, double tol = 0.01);

/// Thread count: `requested` when positive, else RECEST_THREADS, else the
/// hardware concurrency (minimum 1).
int resolve_threads(int requested);

} // namespace recest::harness
