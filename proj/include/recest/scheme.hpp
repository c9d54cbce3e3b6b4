#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recest/linalg.hpp"
#include "recest/rng.hpp"

namespace recest {

/// Observation history available to step t: X_1..X_{t-1} plus the model's
/// X_0 anchor. Schemes must never read the contemporaneous observation
/// through this object (predictability of Gamma_t).
struct History {
    double x0 = 0.0;
    std::vector<double> xs;  // X_1..X_{t-1} while step t runs

    /// X_{t-1} (the anchor x0 when no observation has arrived yet).
    double prev() const noexcept { return xs.empty() ? x0 : xs.back(); }
    long next_t() const noexcept { return static_cast<long>(xs.size()) + 1; }
};

struct EstimatorState {
    long t = 0;
    ParamVec theta_hat;
    /// Accumulated predictable scalar statistic driving the normalizer:
    /// t for i.i.d. schemes, H_t for conditionally additive families.
    double weight_sum = 0.0;
    /// Last normalizer Gamma_t(theta_hat_{t-1}) seen by step().
    SquareMatrix normalizer;
    /// Number of steps skipped because Gamma_t was singular.
    long stalled = 0;
};

struct StepRecord {
    long t = 0;
    double x = 0.0;
    ParamVec theta_hat;   // estimate after the step
    ParamVec psi;
    SquareMatrix gamma;
    ParamVec increment;   // Gamma^{-1} psi, zero when skipped
    bool skipped = false;
};

/// A model/procedure pair: estimating function, predictable normalizer and
/// sampler, plus optional closed-form conditional moments used by the
/// diagnostics. Immutable after construction; safe for concurrent reads.
struct EstimatingScheme {
    std::string id;
    int dim = 1;
    double x0 = 0.0;

    /// Predictable per-step weight increment; the running sum w_t is what
    /// gamma() sees. Built-ins: 1 (i.i.d., w_t = t) or h(X_{t-1}) (additive,
    /// w_t = H_t). Must not depend on the step-t observation.
    std::function<double(const History&)> weight;

    /// Gamma_t(theta) given the accumulated weight, e.g. t*gamma(theta) or
    /// H_t * gddot(theta). Schemes that need the exact O(t) recomputation
    /// can ignore weight_sum and walk the history instead.
    std::function<SquareMatrix(const ParamVec& theta, double weight_sum, const History&)> gamma;

    std::function<ParamVec(const ParamVec& theta, double x_t, const History&)> psi;

    /// Draw X_t from the conditional law at theta_true given the history.
    std::function<double(const ParamVec& theta_true, const History&, SplitMix64&)> sample;

    /// Optional closed form b_t(theta, u) = E_theta[psi_t(theta+u) | F_{t-1}].
    std::function<ParamVec(const ParamVec& theta, const ParamVec& u, const History&)> drift;

    /// Optional closed form E_theta[psi_t(theta+u) psi_t(theta+u)^T | F_{t-1}].
    std::function<SquareMatrix(const ParamVec& theta, const ParamVec& u, const History&)> psi_outer;

    bool has_closed_moments() const { return static_cast<bool>(drift) && static_cast<bool>(psi_outer); }
};

/// One recursion step: theta_t = theta_{t-1} + Gamma_t^{-1} psi_t(theta_{t-1}).
/// Accumulates the predictable weight, skips the update (and counts it) when
/// Gamma_t is singular, and throws NonFiniteUpdateError when psi or the
/// increment is non-finite. Does not append x_t to the history; drivers do
/// that after the call.
StepRecord step(const EstimatingScheme& scheme, EstimatorState& state, double x_t, const History& history);

struct Trajectory {
    std::string scheme_id;
    ParamVec theta_true;
    ParamVec theta0;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    std::vector<StepRecord> steps;

    std::vector<double> observations() const;
};

/// Incremental driver: sample X_t, step, extend the history. Used directly
/// by the Monte Carlo harness so long runs avoid retaining step records.
class TrajectoryRunner {
public:
    TrajectoryRunner(const EstimatingScheme& scheme, ParamVec theta_true, ParamVec theta0,
                     std::uint64_t seed);

    StepRecord advance();

    const EstimatorState& state() const noexcept { return state_; }
    const History& history() const noexcept { return history_; }

private:
    const EstimatingScheme* scheme_;
    ParamVec theta_true_;
    EstimatorState state_;
    History history_;
    SplitMix64 rng_;
};

/// Sample X_1..X_{t_max} under theta_true and run the recursion from theta0.
/// Deterministic given (scheme, theta_true, theta0, t_max, seed).
Trajectory run_trajectory(const EstimatingScheme& scheme, const ParamVec& theta_true,
                          const ParamVec& theta0, long t_max, std::uint64_t seed);

} // namespace recest
