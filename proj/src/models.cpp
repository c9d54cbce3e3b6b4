#include "recest/models.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace recest::models {

// ---------------------------------------------------------------------------
// Cauchy location family
// ---------------------------------------------------------------------------

double cauchy_density(double theta, double x) {
    const double d = x - theta;
    return 1.0 / (std::numbers::pi * (1.0 + d * d));
}

double cauchy_psi(double theta, double x) {
    const double d = x - theta;
    return 2.0 * d / (1.0 + d * d);
}

double cauchy_b(double u) {
    return -2.0 * u / (4.0 + u * u);
}

double cauchy_second_moment(double u) {
    const double q = 4.0 + u * u;
    return 2.0 * (4.0 + 3.0 * u * u) / (q * q);
}

double cauchy_sample(double theta, SplitMix64& rng) {
    return rng.cauchy(theta);
}

IidModel cauchy_model() {
    IidModel m;
    m.id = "cauchy";
    m.dim = 1;
    m.psi = [](const ParamVec& theta, double x) { return ParamVec{cauchy_psi(theta[0], x)}; };
    // i(theta) = 1/2 independent of theta
    m.gamma_matrix = [](const ParamVec&) { return SquareMatrix{{0.5}}; };
    m.sample = [](const ParamVec& theta, SplitMix64& rng) { return cauchy_sample(theta[0], rng); };
    m.drift = [](const ParamVec& u) { return ParamVec{cauchy_b(u[0])}; };
    m.second_moment = [](const ParamVec& u) { return SquareMatrix{{cauchy_second_moment(u[0])}}; };
    m.density = [](double theta, double x) { return cauchy_density(theta, x); };
    return m;
}

EstimatingScheme iid_scheme(const IidModel& model) {
    if (!model.psi || !model.gamma_matrix)
        throw std::invalid_argument("iid_scheme: psi and gamma_matrix are required");
    EstimatingScheme s;
    s.id = model.id;
    s.dim = model.dim;
    s.x0 = 0.0;
    s.weight = [](const History&) { return 1.0; };
    s.gamma = [gm = model.gamma_matrix](const ParamVec& theta, double w, const History&) {
        return w * gm(theta);
    };
    s.psi = [p = model.psi](const ParamVec& theta, double x, const History&) { return p(theta, x); };
    if (model.sample)
        s.sample = [smp = model.sample](const ParamVec& theta, const History&, SplitMix64& rng) {
            return smp(theta, rng);
        };
    if (model.drift)
        s.drift = [d = model.drift](const ParamVec&, const ParamVec& u, const History&) { return d(u); };
    if (model.second_moment)
        s.psi_outer = [m2 = model.second_moment](const ParamVec&, const ParamVec& u, const History&) {
            return m2(u);
        };
    return s;
}

// ---------------------------------------------------------------------------
// Conditionally additive exponential families
// ---------------------------------------------------------------------------

void validate_derivatives(const AdditiveExpFamily& fam, double lo, double hi, int n_points,
                          double tol) {
    if (!(fam.gamma_fn && fam.gdot && fam.gddot))
        throw std::invalid_argument("additive family: gamma_fn, gdot, gddot are required");
    if (n_points < 3 || !(lo < hi)) throw std::invalid_argument("validate_derivatives: bad grid");
    const double fd_step = 1e-4;
    for (int i = 0; i < n_points; ++i) {
        const double v = lo + (hi - lo) * i / (n_points - 1);
        const double fd1 = (fam.gamma_fn(v + fd_step) - fam.gamma_fn(v - fd_step)) / (2.0 * fd_step);
        const double fd2 = (fam.gdot(v + fd_step) - fam.gdot(v - fd_step)) / (2.0 * fd_step);
        const double scale1 = std::max(1.0, std::abs(fam.gdot(v)));
        const double scale2 = std::max(1.0, std::abs(fam.gddot(v)));
        if (std::abs(fd1 - fam.gdot(v)) > tol * scale1)
            throw std::invalid_argument("additive family: gdot disagrees with d/dtheta gamma at theta=" +
                                        std::to_string(v));
        if (std::abs(fd2 - fam.gddot(v)) > tol * scale2)
            throw std::invalid_argument("additive family: gddot disagrees with d/dtheta gdot at theta=" +
                                        std::to_string(v));
        if (fam.gddot(v) < 0.0)
            throw std::invalid_argument("additive family: gddot < 0 at theta=" + std::to_string(v));
    }
}

double additive_score(const AdditiveExpFamily& fam, double theta, double x_t, double x_prev) {
    return fam.m_fn(x_t, x_prev) - fam.gdot(theta) * fam.h(x_prev);
}

double additive_b(const AdditiveExpFamily& fam, double theta, double u, double x_prev) {
    return fam.h(x_prev) * (fam.gdot(theta) - fam.gdot(theta + u));
}

double additive_second_moment(const AdditiveExpFamily& fam, double theta, double u, double x_prev) {
    const double b = additive_b(fam, theta, u, x_prev);
    return fam.gddot(theta) * fam.h(x_prev) + b * b;
}

EstimatingScheme additive_scheme(const AdditiveExpFamily& fam) {
    validate_derivatives(fam);
    if (!(fam.h && fam.m_fn)) throw std::invalid_argument("additive family: h and m_fn are required");
    EstimatingScheme s;
    s.id = fam.id;
    s.dim = 1;
    s.x0 = fam.x0;
    s.weight = [h = fam.h](const History& hist) { return h(hist.prev()); };
    s.gamma = [gdd = fam.gddot](const ParamVec& theta, double w, const History&) {
        return SquareMatrix{{gdd(theta[0]) * w}};
    };
    s.psi = [fam](const ParamVec& theta, double x, const History& hist) {
        return ParamVec{additive_score(fam, theta[0], x, hist.prev())};
    };
    if (fam.sample)
        s.sample = [smp = fam.sample](const ParamVec& theta, const History& hist, SplitMix64& rng) {
            return smp(theta[0], hist.prev(), rng);
        };
    s.drift = [fam](const ParamVec& theta, const ParamVec& u, const History& hist) {
        return ParamVec{additive_b(fam, theta[0], u[0], hist.prev())};
    };
    s.psi_outer = [fam](const ParamVec& theta, const ParamVec& u, const History& hist) {
        return SquareMatrix{{additive_second_moment(fam, theta[0], u[0], hist.prev())}};
    };
    return s;
}

double ar1_sample(double theta, double x_prev, SplitMix64& rng) {
    return theta * x_prev + rng.normal();
}

AdditiveExpFamily gaussian_ar1() {
    AdditiveExpFamily fam;
    fam.id = "ar1";
    fam.gamma_fn = [](double v) { return 0.5 * v * v; };
    fam.gdot = [](double v) { return v; };
    fam.gddot = [](double) { return 1.0; };
    fam.h = [](double x) { return x * x; };
    fam.m_fn = [](double y, double x) { return x * y; };
    fam.sample = [](double theta, double x_prev, SplitMix64& rng) {
        return ar1_sample(theta, x_prev, rng);
    };
    fam.x0 = 0.0;
    return fam;
}

// ---------------------------------------------------------------------------
// AR(1) Fisher information growth
// ---------------------------------------------------------------------------

double fisher_rate_kappa(double theta, long t) {
    if (t < 1) throw std::invalid_argument("fisher_rate_kappa: t < 1");
    const double a = std::abs(theta);
    const double td = static_cast<double>(t);
    if (a < 1.0) return td / (1.0 - theta * theta);
    if (a == 1.0) return 0.5 * td * td;
    const double q = theta * theta - 1.0;
    return std::pow(theta * theta, td) / (q * q);
}

double fisher_rate_log_kappa(double theta, long t) {
    if (t < 1) throw std::invalid_argument("fisher_rate_log_kappa: t < 1");
    const double a = std::abs(theta);
    const double td = static_cast<double>(t);
    if (a < 1.0) return std::log(td) - std::log(1.0 - theta * theta);
    if (a == 1.0) return 2.0 * std::log(td) - std::log(2.0);
    return 2.0 * td * std::log(a) - 2.0 * std::log(theta * theta - 1.0);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, ModelEntry, std::less<>>& registry_storage() {
    static std::map<std::string, ModelEntry, std::less<>> reg = [] {
        std::map<std::string, ModelEntry, std::less<>> r;
        {
            ModelEntry e;
            e.iid = cauchy_model();
            e.scheme = iid_scheme(*e.iid);
            r.emplace("cauchy", std::move(e));
        }
        {
            ModelEntry e;
            e.additive = gaussian_ar1();
            e.scheme = additive_scheme(*e.additive);
            r.emplace("ar1", std::move(e));
        }
        return r;
    }();
    return reg;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

std::optional<ModelEntry> find_model(std::string_view id) {
    std::lock_guard lock(registry_mutex());
    const auto& reg = registry_storage();
    auto it = reg.find(id);
    if (it == reg.end()) return std::nullopt;
    return it->second;
}

void register_model(const ModelEntry& entry) {
    if (entry.scheme.id.empty()) throw std::invalid_argument("register_model: empty scheme id");
    std::lock_guard lock(registry_mutex());
    registry_storage()[entry.scheme.id] = entry;
}

std::vector<std::string> model_ids() {
    std::lock_guard lock(registry_mutex());
    std::vector<std::string> ids;
    for (const auto& [k, v] : registry_storage()) ids.push_back(k);
    return ids;
}

} // namespace recest::models
