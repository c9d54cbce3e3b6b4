#include "recest/scheme.hpp"

#include <stdexcept>
#include <utility>

#include "recest/errors.hpp"

namespace recest {

StepRecord step(const EstimatingScheme& scheme, EstimatorState& state, double x_t,
                const History& history) {
    const long t = state.t + 1;
    if (history.next_t() != t)
        throw std::logic_error("step: history length does not match state.t");
    if (state.theta_hat.dim() != scheme.dim)
        throw std::invalid_argument("step: state dimension does not match scheme");

    state.weight_sum += scheme.weight(history);
    SquareMatrix gamma = scheme.gamma(state.theta_hat, state.weight_sum, history);
    ParamVec psi = scheme.psi(state.theta_hat, x_t, history);
    if (!psi.all_finite()) throw NonFiniteUpdateError(t, "psi");

    StepRecord rec;
    rec.t = t;
    rec.x = x_t;
    rec.psi = psi;
    rec.gamma = gamma;
    rec.increment = ParamVec(scheme.dim, 0.0);

    auto inv = try_invert(gamma);
    if (!inv) {
        rec.skipped = true;
        ++state.stalled;
    } else {
        ParamVec increment = inv->inverse.apply(psi);
        if (!increment.all_finite()) throw NonFiniteUpdateError(t, "increment");
        state.theta_hat += increment;
        if (!state.theta_hat.all_finite()) throw NonFiniteUpdateError(t, "estimate");
        rec.increment = std::move(increment);
    }
    state.t = t;
    state.normalizer = std::move(gamma);
    rec.theta_hat = state.theta_hat;
    return rec;
}

std::vector<double> Trajectory::observations() const {
    std::vector<double> xs;
    xs.reserve(steps.size());
    for (const auto& s : steps) xs.push_back(s.x);
    return xs;
}

TrajectoryRunner::TrajectoryRunner(const EstimatingScheme& scheme, ParamVec theta_true,
                                   ParamVec theta0, std::uint64_t seed)
    : scheme_(&scheme), theta_true_(std::move(theta_true)), rng_(seed) {
    if (theta_true_.dim() != scheme.dim || theta0.dim() != scheme.dim)
        throw std::invalid_argument("TrajectoryRunner: parameter dimension mismatch");
    state_.theta_hat = std::move(theta0);
    state_.normalizer = SquareMatrix(scheme.dim, 0.0);
    history_.x0 = scheme.x0;
}

StepRecord TrajectoryRunner::advance() {
    const double x_t = scheme_->sample(theta_true_, history_, rng_);
    StepRecord rec = step(*scheme_, state_, x_t, history_);
    history_.xs.push_back(x_t);
    return rec;
}

Trajectory run_trajectory(const EstimatingScheme& scheme, const ParamVec& theta_true,
                          const ParamVec& theta0, long t_max, std::uint64_t seed) {
    if (t_max < 0) throw std::invalid_argument("run_trajectory: negative t_max");
    Trajectory traj;
    traj.scheme_id = scheme.id;
    traj.theta_true = theta_true;
    traj.theta0 = theta0;
    traj.seed = seed;
    traj.x0 = scheme.x0;
    traj.steps.reserve(static_cast<std::size_t>(t_max));

    TrajectoryRunner runner(scheme, theta_true, theta0, seed);
    for (long t = 1; t <= t_max; ++t) traj.steps.push_back(runner.advance());
    return traj;
}

} // namespace recest
