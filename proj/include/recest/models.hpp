#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recest/linalg.hpp"
#include "recest/rng.hpp"
#include "recest/scheme.hpp"

namespace recest::models {

// ---------------------------------------------------------------------------
// Cauchy location family (standard scale)
// ---------------------------------------------------------------------------

/// Density 1 / (pi (1 + (x - theta)^2)).
double cauchy_density(double theta, double x);

/// Score 2(x - theta) / (1 + (x - theta)^2); bounded by 1 in absolute value.
double cauchy_psi(double theta, double x);

/// Conditional drift of the score at the perturbed parameter:
/// b(u) = -2u / (4 + u^2). Location families are shift invariant, so the
/// drift depends on u only.
double cauchy_b(double u);

/// Second moment of the perturbed score, 2(4 + 3u^2) / (4 + u^2)^2.
/// At u = 0 this is the one-step Fisher information i(theta) = 1/2.
double cauchy_second_moment(double u);

double cauchy_sample(double theta, SplitMix64& rng);

// ---------------------------------------------------------------------------
// i.i.d. schemes: Gamma_t(theta) = t * gamma(theta)
// ---------------------------------------------------------------------------

/// An i.i.d. model with its estimating function and the non-random
/// per-observation normalizer gamma(theta). Closed-form moments, when
/// supplied, are parameterized by the perturbation u with the parameter at
/// the location-invariant origin (shift families).
struct IidModel {
    std::string id;
    int dim = 1;
    std::function<ParamVec(const ParamVec& theta, double x)> psi;
    std::function<SquareMatrix(const ParamVec& theta)> gamma_matrix;
    std::function<double(const ParamVec& theta_true, SplitMix64&)> sample;

    // optional closed forms
    std::function<ParamVec(const ParamVec& u)> drift;                  // b(u)
    std::function<SquareMatrix(const ParamVec& u)> second_moment;      // E[psi psi^T](u)
    std::function<double(double theta, double x)> density;             // quadrature fallback, dim 1
};

/// Wrap an i.i.d. model into the general recursion with Gamma_t = t*gamma(theta).
EstimatingScheme iid_scheme(const IidModel& model);

IidModel cauchy_model();

// ---------------------------------------------------------------------------
// Conditionally additive exponential families
//   f(y; theta, x) = h(x,y) exp(theta m(y,x) - gamma(theta) h(x))
// ---------------------------------------------------------------------------

struct AdditiveExpFamily {
    std::string id;
    std::function<double(double)> gamma_fn;
    std::function<double(double)> gdot;
    std::function<double(double)> gddot;
    std::function<double(double)> h;                      // h(x) >= 0
    std::function<double(double y, double x)> m_fn;
    std::function<double(double theta, double x_prev, SplitMix64&)> sample;
    double x0 = 0.0;
};

/// Check the supplied gdot/gddot against central finite differences of
/// gamma_fn/gdot on a uniform grid; throws std::invalid_argument on mismatch.
void validate_derivatives(const AdditiveExpFamily& fam, double lo = -2.0, double hi = 2.0,
                          int n_points = 17, double tol = 1e-6);

/// Score l_t(theta) = m(x_t, x_prev) - gdot(theta) h(x_prev).
double additive_score(const AdditiveExpFamily& fam, double theta, double x_t, double x_prev);

/// Drift b_t(theta, u) = h(x_prev) (gdot(theta) - gdot(theta+u)); zero at u = 0.
double additive_b(const AdditiveExpFamily& fam, double theta, double u, double x_prev);

/// E[l_t^2(theta+u) | F_{t-1}] = gddot(theta) h(x_prev) + b_t^2(theta, u).
double additive_second_moment(const AdditiveExpFamily& fam, double theta, double u, double x_prev);

/// Wrap the family into the general recursion with Gamma_t = gddot(theta) H_t,
/// H_t = sum_{s<=t} h(X_{s-1}). Validates the supplied derivatives.
EstimatingScheme additive_scheme(const AdditiveExpFamily& fam);

/// Gaussian AR(1): X_t = theta X_{t-1} + Z_t, X_0 = 0, standard normal Z.
/// gamma(theta) = theta^2/2, h(x) = x^2, m(y,x) = xy.
AdditiveExpFamily gaussian_ar1();

double ar1_sample(double theta, double x_prev, SplitMix64& rng);

// ---------------------------------------------------------------------------
// AR(1) Fisher information growth
// ---------------------------------------------------------------------------

/// kappa_t(theta): t/(1-theta^2) for |theta|<1, t^2/2 at |theta|=1,
/// theta^{2t} (theta^2-1)^{-2} for |theta|>1.
double fisher_rate_kappa(double theta, long t);

/// log kappa_t(theta); avoids overflow in the explosive regime.
double fisher_rate_log_kappa(double theta, long t);

// ---------------------------------------------------------------------------
// Model registry (string ids shared with the CLI)
// ---------------------------------------------------------------------------

struct ModelEntry {
    EstimatingScheme scheme;
    std::optional<IidModel> iid;
    std::optional<AdditiveExpFamily> additive;
};

/// Look up a built-in ("cauchy", "ar1") or registered user model.
std::optional<ModelEntry> find_model(std::string_view id);

/// Register a user family under scheme.id; replaces any existing entry.
void register_model(const ModelEntry& entry);

std::vector<std::string> model_ids();

} // namespace recest::models
