#include "doctest.h"

#include <cmath>
#include <limits>

#include "recest/errors.hpp"
#include "recest/models.hpp"
#include "recest/scheme.hpp"

using namespace recest;

namespace {

EstimatingScheme cauchy_scheme() { return models::iid_scheme(models::cauchy_model()); }
EstimatingScheme ar1_scheme() { return models::additive_scheme(models::gaussian_ar1()); }

} // namespace

TEST_CASE("cauchy step: theta0=0, X1=1 gives Gamma=1/2, psi=1, theta1=2") {
    const auto scheme = cauchy_scheme();
    EstimatorState st;
    st.theta_hat = ParamVec{0.0};
    st.normalizer = SquareMatrix(1);
    History hist;
    const StepRecord rec = step(scheme, st, 1.0, hist);
    CHECK(rec.gamma.scalar() == 0.5);
    CHECK(rec.psi.scalar() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rec.increment.scalar() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(st.theta_hat.scalar() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_FALSE(rec.skipped);
    CHECK(st.t == 1);
}

TEST_CASE("ar1 first step skips on singular normalizer, second matches least squares") {
    const auto scheme = ar1_scheme();
    EstimatorState st;
    st.theta_hat = ParamVec{0.0};
    st.normalizer = SquareMatrix(1);
    History hist;

    // t=1: I_1 = X_0^2 = 0, the update must be skipped.
    const StepRecord r1 = step(scheme, st, 0.8, hist);
    CHECK(r1.skipped);
    CHECK(st.theta_hat.scalar() == 0.0);
    CHECK(st.stalled == 1);
    CHECK(r1.increment.scalar() == 0.0);
    hist.xs.push_back(0.8);

    // t=2: I_2 = X_1^2 = 0.64, psi = X_2 X_1 = 0.8, theta = 0.8/0.64 = 1.25.
    const StepRecord r2 = step(scheme, st, 1.0, hist);
    CHECK_FALSE(r2.skipped);
    CHECK(r2.gamma.scalar() == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(r2.psi.scalar() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(st.theta_hat.scalar() == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(st.weight_sum == doctest::Approx(0.64).epsilon(1e-15));
}

TEST_CASE("run_trajectory: t_max=0 yields no steps") {
    const auto traj = run_trajectory(cauchy_scheme(), ParamVec{1.0}, ParamVec{0.0}, 0, 9);
    CHECK(traj.steps.empty());
}

TEST_CASE("run_trajectory determinism: same seed, bit-identical records") {
    const auto scheme = cauchy_scheme();
    const auto a = run_trajectory(scheme, ParamVec{1.0}, ParamVec{0.0}, 200, 77);
    const auto b = run_trajectory(scheme, ParamVec{1.0}, ParamVec{0.0}, 200, 77);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].x == b.steps[i].x);
        CHECK(a.steps[i].theta_hat.scalar() == b.steps[i].theta_hat.scalar());
        CHECK(a.steps[i].increment.scalar() == b.steps[i].increment.scalar());
    }
    const auto c = run_trajectory(scheme, ParamVec{1.0}, ParamVec{0.0}, 200, 78);
    CHECK(a.steps[0].x != c.steps[0].x);
}

TEST_CASE("exact step identity Gamma (theta_t - theta_{t-1}) = psi") {
    for (const auto& scheme : {cauchy_scheme(), ar1_scheme()}) {
        const auto traj = run_trajectory(scheme, ParamVec{0.7}, ParamVec{-1.0}, 500, 31337);
        double theta_prev = traj.theta0.scalar();
        for (const auto& rec : traj.steps) {
            if (!rec.skipped) {
                const double lhs = rec.gamma.scalar() * (rec.theta_hat.scalar() - theta_prev);
                const double scale = std::max(1.0, std::abs(rec.psi.scalar()));
                CHECK(std::abs(lhs - rec.psi.scalar()) <= 1e-10 * scale);
            } else {
                CHECK(rec.theta_hat.scalar() == theta_prev);
            }
            theta_prev = rec.theta_hat.scalar();
        }
    }
}

TEST_CASE("predictability: Gamma_t does not change when x_t changes") {
    for (const auto& scheme : {cauchy_scheme(), ar1_scheme()}) {
        History hist;
        hist.x0 = scheme.x0;
        hist.xs = {0.4, -1.3, 2.2};

        double weight_sum = 0.0;
        History partial;
        partial.x0 = scheme.x0;
        for (double x : hist.xs) {
            weight_sum += scheme.weight(partial);
            partial.xs.push_back(x);
        }

        EstimatorState st1;
        st1.t = 3;
        st1.theta_hat = ParamVec{0.3};
        st1.normalizer = SquareMatrix(1);
        st1.weight_sum = weight_sum;
        EstimatorState st2 = st1;

        const StepRecord a = step(scheme, st1, 5.0, hist);
        const StepRecord b = step(scheme, st2, -123.0, hist);
        CHECK(a.gamma.scalar() == b.gamma.scalar());
    }
}

TEST_CASE("skipped steps never change theta and stalled counts them") {
    EstimatingScheme s;
    s.id = "degenerate";
    s.dim = 1;
    s.weight = [](const History&) { return 0.0; };
    s.gamma = [](const ParamVec&, double w, const History&) { return SquareMatrix{{w}}; };
    s.psi = [](const ParamVec&, double x, const History&) { return ParamVec{x}; };
    s.sample = [](const ParamVec&, const History&, SplitMix64& rng) { return rng.uniform01(); };
    const auto traj = run_trajectory(s, ParamVec{0.0}, ParamVec{1.5}, 50, 4);
    for (const auto& rec : traj.steps) {
        CHECK(rec.skipped);
        CHECK(rec.theta_hat.scalar() == 1.5);
    }
}

TEST_CASE("non-finite psi raises NonFiniteUpdateError with the failing step") {
    EstimatingScheme s;
    s.id = "nan-psi";
    s.dim = 1;
    s.weight = [](const History&) { return 1.0; };
    s.gamma = [](const ParamVec&, double w, const History&) { return SquareMatrix{{w}}; };
    s.psi = [](const ParamVec&, double, const History& h) {
        return ParamVec{h.next_t() >= 3 ? std::numeric_limits<double>::quiet_NaN() : 1.0};
    };
    s.sample = [](const ParamVec&, const History&, SplitMix64&) { return 0.0; };
    try {
        (void)run_trajectory(s, ParamVec{0.0}, ParamVec{0.0}, 10, 1);
        FAIL("expected NonFiniteUpdateError");
    } catch (const NonFiniteUpdateError& e) {
        CHECK(e.step() == 3);
    }
}

TEST_CASE("cauchy consistency: |theta_hat - 1| < 0.2 for >= 95% of 100 seeds") {
    const auto scheme = cauchy_scheme();
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        TrajectoryRunner runner(scheme, ParamVec{1.0}, ParamVec{0.0}, replication_seed(1234, seed));
        for (long t = 1; t <= 10000; ++t) runner.advance();
        if (std::abs(runner.state().theta_hat.scalar() - 1.0) < 0.2) ++ok;
    }
    CHECK(ok >= 95);
}

TEST_CASE("generic exact-recompute gamma walks the history") {
    // A user scheme may ignore weight_sum and recompute Gamma_t = sum_s i_s
    // in O(t); check it agrees with the factorized AR(1) form.
    const auto fam = models::gaussian_ar1();
    EstimatingScheme exact = models::additive_scheme(fam);
    exact.gamma = [fam](const ParamVec& theta, double, const History& h) {
        double total = 0.0;
        double x_prev = 0.0;
        for (std::size_t s = 0; s <= h.xs.size(); ++s) {
            total += fam.gddot(theta[0]) * fam.h(x_prev);
            if (s < h.xs.size()) x_prev = h.xs[s];
        }
        return SquareMatrix{{total}};
    };
    const auto a = run_trajectory(exact, ParamVec{0.5}, ParamVec{0.0}, 100, 5);
    const auto b = run_trajectory(models::additive_scheme(fam), ParamVec{0.5}, ParamVec{0.0}, 100, 5);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].gamma.scalar() == doctest::Approx(b.steps[i].gamma.scalar()).epsilon(1e-12));
        CHECK(a.steps[i].theta_hat.scalar() ==
              doctest::Approx(b.steps[i].theta_hat.scalar()).epsilon(1e-12));
    }
}
