#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recest/linalg.hpp"
#include "recest/models.hpp"
#include "recest/scheme.hpp"

namespace recest::diag {

// ---------------------------------------------------------------------------
// Grids and reports
// ---------------------------------------------------------------------------

/// Uniform grid in the perturbation u. Expressions with the 0/0 convention
/// substitute their defined limit at u = 0 instead of evaluating literally.
struct GridSpec {
    double lo = -1.0;
    double hi = 1.0;
    int n_points = 41;
};

std::vector<double> grid_points(const GridSpec& grid);

struct Witness {
    double where = 0.0;  // grid point u or step index t
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

struct ConditionReport {
    std::string condition;
    std::string model;
    bool verdict = false;
    std::string region;
    std::vector<Witness> witnesses;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::string> notes;

    void set_param(const std::string& name, double value);
    double param(const std::string& name) const;  // throws when absent
    bool has_param(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// i.i.d. hypotheses (B1), (B2) and the stability matrix
// ---------------------------------------------------------------------------

/// (B1): (C u, gamma^{-1}(theta+u) b(u)) <= -1/2 (C u, u) on the grid.
/// Reports the largest symmetric interval around 0 on which it holds.
/// Falls back to quadrature of psi against the density when the model lacks
/// a closed-form drift (flagged); throws MissingDriftError when neither is
/// available. Scalar-parameter models only.
ConditionReport check_B1(const models::IidModel& model, const SquareMatrix& C,
                         const GridSpec& grid);

/// (B2): sup over the grid of E||gamma^{-1}(theta+u) psi(theta+u)||^2,
/// verdict = finite and below `bound`.
ConditionReport check_B2(const models::IidModel& model, const GridSpec& grid,
                         double bound = 100.0);

struct StabilityResult {
    SquareMatrix B;              // Jacobian of R(u) = gamma^{-1}(u) b(u) at 0
    SquareMatrix S;              // B + I/2
    bool stable = false;
    bool sufficient_only = false;  // Gershgorin bound used (m > 2)
    double max_real_eigenvalue = 0.0;
};

/// Central finite-difference Jacobian of R at u = 0 and the stability verdict
/// on S = B + I/2: exact eigenvalues for m <= 2, Gershgorin disc bound above.
StabilityResult estimate_B_matrix(const models::IidModel& model, double fd_step = 1e-6);

// ---------------------------------------------------------------------------
// Additive-family hypotheses (M1)-(M3)
// ---------------------------------------------------------------------------

struct MThresholds {
    double m1_tail_max = 0.01;
};

ConditionReport check_M_conditions(const models::AdditiveExpFamily& fam, const GridSpec& grid,
                                   const Trajectory& trajectory, const MThresholds& thr = {});

// ---------------------------------------------------------------------------
// K-trace and the Robbins-Siegmund premise
// ---------------------------------------------------------------------------

enum class ASeries { StepCount, WeightSum };

/// a_t values along a trajectory: t, or the scheme's accumulated weight
/// (H_t for additive families).
std::vector<double> a_series_for(const EstimatingScheme& scheme, const Trajectory& trajectory,
                                 ASeries choice);

struct KTraceRow {
    long t = 0;
    double v_prev = 0.0;   // V_{t-1}(Delta_{t-1})
    double dv = 0.0;       // Delta V_t(Delta_{t-1})
    double drift = 0.0;    // 2 (C_t Delta, Gamma^{-1} b)
    double moment = 0.0;   // E[(Gamma^{-1} psi)^T C_t (Gamma^{-1} psi)]
    double k = 0.0;        // dv + drift + moment, stored as the exact sum
    double k_pos = 0.0;
    double k_neg = 0.0;
    double premise_increment = 0.0;   // (1 + v_prev)^{-1} k_pos
    double premise_partial_sum = 0.0;
    double v_cur = 0.0;    // V_t(Delta_t)
    bool degenerate = false;  // Gamma_t singular; drift/moment unavailable
};

struct KTrace {
    double delta = 0.0;
    std::vector<KTraceRow> rows;
};

/// K_t per step from the scheme's closed-form conditional moments, with
/// C_t(theta) = C a_t^{2 delta}. Rows where Gamma_t(theta + Delta) is
/// singular carry the Delta V term only. Requires 0 <= delta < 1/2
/// (delta = 0 gives the constant-C trace).
KTrace k_trace(const EstimatingScheme& scheme, const Trajectory& trajectory, const SquareMatrix& C,
               std::span<const double> a_series, double delta);

// ---------------------------------------------------------------------------
// Rate hypotheses (R1)-(R3)
// ---------------------------------------------------------------------------

struct RThresholds {
    double r1_tail_max = 0.01;
    double plateau_frac = 0.01;
};

/// Pure series check of the rate conditions (R1)-(R3); all inputs are
/// per-step series of equal length (t = 1..T). Entries where a_t = 0
/// contribute nothing (0/0 = 0 convention) and are counted in the report.
ConditionReport check_R_conditions(std::span<const double> a, std::span<const double> lambda,
                                   std::span<const double> P,
                                   std::span<const double> norm_second_moment, double epsilon,
                                   const RThresholds& thr = {});

struct RSeriesInput {
    std::vector<double> a;
    std::vector<double> lambda;
    std::vector<double> P;
    std::vector<double> norm_second_moment;
};

/// Default series for an additive family: a_t = H_t, the proof's
/// lambda_t = 2(1-eps~) h/H_t - (1+eps~)^2 h^2/H_t^2, and
/// P_t = ||Gamma^{-1} b||^2.
RSeriesInput build_r_series_additive(const models::AdditiveExpFamily& fam,
                                     const Trajectory& trajectory, double eps_tilde = 0.05);

/// Default series for an i.i.d. model: a_t = t, lambda_t = 1/t, P_t = 0.
RSeriesInput build_r_series_iid(const models::IidModel& model, const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Script-N statistic (additive families, V(u) = u^2)
// ---------------------------------------------------------------------------

/// N_t(u) for the additive family, with the u = 0 limit substituted per the
/// 0/0 = 0 convention. Requires H_t > 0.
double script_N(const models::AdditiveExpFamily& fam, double theta, double u, double h_prev,
                double H_t);

struct GThresholds {
    double plateau_frac = 0.01;
    int grid_points_per_side = 25;
};

/// G-trace along a trajectory: (G3) premise partial sums plateau, (G2)
/// partial sums of inf over {eps <= |u| <= 1/eps} of [N_t]^- keep growing,
/// and the bracket of the Gr1 inequality stays >= 1 over the tail. The (G2)
/// divergence is checked per trajectory; the positive-probability quantifier
/// of the underlying consistency statement is not observable from one path.
ConditionReport check_G_conditions(const models::AdditiveExpFamily& fam,
                                   const Trajectory& trajectory, double epsilon,
                                   const GThresholds& thr = {});

// ---------------------------------------------------------------------------
// Almost-supermartingale monitor (Robbins-Siegmund premise/conclusion)
// ---------------------------------------------------------------------------

struct RobbinsSiegmundReport {
    std::vector<double> beta_partial;
    std::vector<double> xi_partial;
    std::vector<double> zeta_partial;
    bool beta_plateau = false;
    bool xi_plateau = false;
    bool zeta_plateau = false;
    bool premise_satisfied = false;  // beta and xi partial sums plateau
    double x_last_quartile_range = 0.0;
    double x_running_max = 0.0;
    bool x_converges = false;
};

RobbinsSiegmundReport robbins_siegmund_monitor(std::span<const double> X,
                                               std::span<const double> beta,
                                               std::span<const double> xi,
                                               std::span<const double> zeta,
                                               double plateau_frac = 0.01,
                                               double x_range_frac = 0.1);

// ---------------------------------------------------------------------------
// Series behavior of sum dd_n/d_n and sum dd_n/d_n^{1+eps}
// ---------------------------------------------------------------------------

struct PropA2Sums {
    std::vector<double> sum1;  // partial sums of dd_n / d_n
    std::vector<double> sum2;  // partial sums of dd_n / d_n^{1+eps}
    double bound = 0.0;        // (1/eps) d_0^{-eps}
    bool bound_satisfied = false;
};

/// d is the sequence d_0..d_N (positive, non-decreasing); sums run over n>=1.
PropA2Sums prop_A2_sums(std::span<const double> d, double epsilon);

} // namespace recest::diag
