#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recest/diagnostics.hpp"
#include "recest/harness.hpp"
#include "recest/scheme.hpp"

namespace recest::io {

inline constexpr const char* kSpecVersion = "1";

/// CSV with header t,x,theta_hat,gamma,psi,increment,skipped (scalar models).
std::string trajectory_csv(const Trajectory& trajectory);

std::string trajectory_json(const Trajectory& trajectory);

struct RateMeta {
    std::string model;
    double theta = 0.0;
    double theta0 = 0.0;
    std::uint64_t seed = 0;
    int reps = 0;
    long t_max = 0;
    std::string a_choice;  // "t" or "H"
};

std::string rate_report_json(const harness::RateReport& report, const RateMeta& meta);

/// Raw checkpoint matrix: rep,t,delta_abs,scaled,ratio.
std::string ensemble_csv(const harness::Ensemble& ensemble);

std::string condition_report_json(const diag::ConditionReport& report);

struct OracleResult {
    std::string model;
    std::string quantity;  // "b" or "m2"
    double u = 0.0;
    double closed_form = 0.0;
    double quadrature = 0.0;
    double abs_diff = 0.0;
    double tol = 0.0;
    bool ok = false;
};

std::string oracle_result_json(const OracleResult& result);

/// CSV with header t,V,dV,drift,moment,K,premise_partial_sum[,scriptN].
/// V is the Lyapunov value at the current estimate, V_t(Delta_t).
std::string ktrace_csv(const diag::KTrace& trace, const std::vector<double>* script_n);

} // namespace recest::io
