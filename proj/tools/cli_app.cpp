#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "recest/diagnostics.hpp"
#include "recest/errors.hpp"
#include "recest/harness.hpp"
#include "recest/models.hpp"
#include "recest/quadrature.hpp"
#include "recest/report_io.hpp"

namespace recest::cli {

namespace {

models::ModelEntry require_model(const std::string& id) {
    auto entry = models::find_model(id);
    if (!entry) throw std::invalid_argument("unknown model: " + id);
    return *std::move(entry);
}

std::string default_a_choice(const models::ModelEntry& entry) {
    return entry.additive ? "H" : "t";
}

harness::AChoice parse_a_choice(const std::string& s) {
    if (s == "t") return harness::AChoice::StepCount;
    if (s == "H") return harness::AChoice::WeightSum;
    throw std::invalid_argument("a-choice must be 't' or 'H'");
}

std::vector<long> default_checkpoints(long t_max) {
    // Half decades 10^2 .. 10^4.
    const std::vector<long> standard = {100, 316, 1000, 3162, 10000};
    std::vector<long> out;
    for (long c : standard)
        if (c <= t_max) out.push_back(c);
    return out;
}

int usage_error(const std::string& message) {
    std::fputs(("error: " + message + "\n").c_str(), stderr);
    return kExitUsage;
}

} // namespace

int run_simulate(const SimulateConfig& cfg, std::string& out) {
    if (cfg.format != "csv" && cfg.format != "json")
        return usage_error("simulate: format must be csv or json");
    if (cfg.t_max < 0) return usage_error("simulate: t-max must be >= 0");
    models::ModelEntry entry;
    try {
        entry = require_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    try {
        const Trajectory traj =
            run_trajectory(entry.scheme, ParamVec{cfg.theta}, ParamVec{cfg.theta0}, cfg.t_max, cfg.seed);
        out = cfg.format == "csv" ? io::trajectory_csv(traj) : io::trajectory_json(traj);
    } catch (const NonFiniteUpdateError& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    }
    return kExitOk;
}

int run_rate(const RateConfig& cfg, std::string& out) {
    if (cfg.format != "csv" && cfg.format != "json")
        return usage_error("rate: format must be csv or json");
    models::ModelEntry entry;
    try {
        entry = require_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    harness::MonteCarloConfig mc;
    mc.reps = cfg.reps;
    mc.t_max = cfg.t_max;
    mc.checkpoints = cfg.checkpoints.empty() ? default_checkpoints(cfg.t_max) : cfg.checkpoints;
    mc.master_seed = cfg.seed;
    mc.theta_true = ParamVec{cfg.theta};
    mc.theta0 = ParamVec{cfg.theta0};
    mc.delta = cfg.delta;
    mc.threads = cfg.threads;
    const std::string a_choice = cfg.a_choice.empty() ? default_a_choice(entry) : cfg.a_choice;
    try {
        mc.a_choice = parse_a_choice(a_choice);
        harness::validate_config(mc, entry.scheme);
        if (mc.reps < 30) throw std::invalid_argument("rate: reps must be >= 30");
        if (mc.checkpoints.size() < 3)
            throw std::invalid_argument("rate: need >= 3 checkpoints within t_max");
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    try {
        const auto ensemble = harness::run_monte_carlo(entry.scheme, mc);
        if (cfg.format == "csv") {
            out = io::ensemble_csv(ensemble);
        } else {
            const auto report = harness::estimate_rate(ensemble);
            io::RateMeta meta;
            meta.model = cfg.model;
            meta.theta = cfg.theta;
            meta.theta0 = cfg.theta0;
            meta.seed = cfg.seed;
            meta.reps = cfg.reps;
            meta.t_max = cfg.t_max;
            meta.a_choice = a_choice;
            out = io::rate_report_json(report, meta);
        }
    } catch (const InsufficientDataError& e) {
        return usage_error(e.what());
    } catch (const NonFiniteUpdateError& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    }
    return kExitOk;
}

int run_check(const CheckConfig& cfg, std::string& out) {
    models::ModelEntry entry;
    try {
        entry = require_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    diag::GridSpec grid;
    grid.lo = cfg.u_min != 0.0 ? cfg.u_min : -cfg.u_max;
    grid.hi = cfg.u_max;
    grid.n_points = cfg.grid_n;

    try {
        diag::ConditionReport report;
        if (cfg.condition == "B1" || cfg.condition == "B2") {
            if (!entry.iid)
                return usage_error("condition " + cfg.condition + " applies to i.i.d. models");
            report = cfg.condition == "B1"
                         ? diag::check_B1(*entry.iid, SquareMatrix{{cfg.c}}, grid)
                         : diag::check_B2(*entry.iid, grid, cfg.bound);
        } else if (cfg.condition == "M" || cfg.condition == "G") {
            if (!entry.additive)
                return usage_error("condition " + cfg.condition + " applies to additive families");
            const Trajectory traj = run_trajectory(entry.scheme, ParamVec{cfg.theta},
                                                   ParamVec{cfg.theta0}, cfg.t_max, cfg.seed);
            report = cfg.condition == "M"
                         ? diag::check_M_conditions(*entry.additive, grid, traj)
                         : diag::check_G_conditions(*entry.additive, traj, cfg.epsilon);
        } else if (cfg.condition == "R") {
            if (!entry.additive && !entry.iid)
                return usage_error("condition R needs an additive or i.i.d. model");
            const Trajectory traj = run_trajectory(entry.scheme, ParamVec{cfg.theta},
                                                   ParamVec{cfg.theta0}, cfg.t_max, cfg.seed);
            const diag::RSeriesInput series =
                entry.additive ? diag::build_r_series_additive(*entry.additive, traj, cfg.eps_tilde)
                               : diag::build_r_series_iid(*entry.iid, traj);
            report = diag::check_R_conditions(series.a, series.lambda, series.P,
                                              series.norm_second_moment, cfg.epsilon);
            report.model = cfg.model;
            if (entry.additive) {
                report.set_param("eps_tilde", cfg.eps_tilde);
                report.notes.push_back("a_t = H_t, P_t = |Gamma^{-1} b|^2 (additive defaults)");
            } else {
                report.notes.push_back("a_t = t, lambda_t = 1/t, P_t = 0 (i.i.d. defaults)");
            }
        } else {
            return usage_error("unknown condition: " + cfg.condition +
                               " (expected B1, B2, M, R, or G)");
        }
        out = io::condition_report_json(report);
        return report.verdict ? kExitOk : kExitViolated;
    } catch (const MissingDriftError& e) {
        return usage_error(e.what());
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    } catch (const NonFiniteUpdateError& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    }
}

int run_oracle(const OracleConfig& cfg, std::string& out) {
    if (cfg.quantity != "b" && cfg.quantity != "m2")
        return usage_error("oracle: quantity must be b or m2");
    models::ModelEntry entry;
    try {
        entry = require_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    if (!entry.iid || !entry.iid->density || !entry.iid->psi)
        return usage_error("oracle: model must be i.i.d. with a density");
    const auto& model = *entry.iid;
    const bool want_b = cfg.quantity == "b";
    if ((want_b && !model.drift) || (!want_b && !model.second_moment))
        return usage_error("oracle: model lacks the closed form for " + cfg.quantity);

    io::OracleResult result;
    result.model = cfg.model;
    result.quantity = cfg.quantity;
    result.u = cfg.u;
    result.tol = cfg.tol;
    result.closed_form = want_b ? model.drift(ParamVec{cfg.u}).scalar()
                                : model.second_moment(ParamVec{cfg.u}).scalar();
    try {
        const double quad_tol = std::min(1e-8, cfg.tol / 10.0);
        result.quadrature = diag::integrate_real_line(
            [&](double x) {
                const double p = model.psi(ParamVec{cfg.u}, x).scalar();
                return (want_b ? p : p * p) * model.density(0.0, x);
            },
            std::max(quad_tol, 1e-12));
    } catch (const MaxDepthError& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    }
    result.abs_diff = std::abs(result.quadrature - result.closed_form);
    result.ok = result.abs_diff <= cfg.tol;
    out = io::oracle_result_json(result);
    return result.ok ? kExitOk : kExitViolated;
}

int run_ktrace(const KtraceConfig& cfg, std::string& out) {
    models::ModelEntry entry;
    try {
        entry = require_model(cfg.model);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    if (!entry.scheme.has_closed_moments())
        return usage_error("ktrace: model lacks closed-form conditional moments");
    if (!(cfg.delta >= 0.0 && cfg.delta < 0.5))
        return usage_error("ktrace: delta must lie in [0, 1/2)");
    const std::string a_choice = cfg.a_choice.empty() ? default_a_choice(entry) : cfg.a_choice;
    diag::ASeries a_kind;
    try {
        a_kind = parse_a_choice(a_choice) == harness::AChoice::StepCount ? diag::ASeries::StepCount
                                                                         : diag::ASeries::WeightSum;
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    try {
        const Trajectory traj = run_trajectory(entry.scheme, ParamVec{cfg.theta},
                                               ParamVec{cfg.theta0}, cfg.t_max, cfg.seed);
        const auto a_series = diag::a_series_for(entry.scheme, traj, a_kind);
        const auto trace =
            diag::k_trace(entry.scheme, traj, SquareMatrix{{cfg.c}}, a_series, cfg.delta);

        if (entry.additive) {
            // Script-N column at the realized perturbation; rows with H_t = 0
            // have h(X_{t-1}) = 0 as well and carry the natural value 0.
            const auto& fam = *entry.additive;
            std::vector<double> script_n;
            script_n.reserve(traj.steps.size());
            double H = 0.0;
            double x_prev = traj.x0;
            double theta_prev = traj.theta0.scalar();
            for (const auto& s : traj.steps) {
                const double h = fam.h(x_prev);
                H += h;
                if (H > 0.0)
                    script_n.push_back(
                        diag::script_N(fam, cfg.theta, theta_prev - cfg.theta, h, H));
                else
                    script_n.push_back(0.0);
                x_prev = s.x;
                theta_prev = s.theta_hat.scalar();
            }
            out = io::ktrace_csv(trace, &script_n);
        } else {
            out = io::ktrace_csv(trace, nullptr);
        }
    } catch (const NonFiniteUpdateError& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }
    return kExitOk;
}

namespace {

int write_output(const std::string& path, const std::string& contents) {
    if (path.empty()) {
        std::fwrite(contents.data(), 1, contents.size(), stdout);
        return kExitOk;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::fputs(("error: cannot open output file " + path + "\n").c_str(), stderr);
        return kExitUsage;
    }
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    return f ? kExitOk : kExitUsage;
}

} // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"recursive parameter estimation toolkit"};
    app.require_subcommand(1);

    SimulateConfig sim;
    RateConfig rate;
    CheckConfig check;
    OracleConfig oracle;
    KtraceConfig ktrace;
    std::string out_path;
    std::string checkpoints_arg;

    auto* sub_sim = app.add_subcommand("simulate", "run one trajectory and emit step records");
    sub_sim->add_option("--model", sim.model, "model id (cauchy, ar1)");
    sub_sim->add_option("--theta", sim.theta, "true parameter");
    sub_sim->add_option("--theta0", sim.theta0, "initial estimate");
    sub_sim->add_option("--t-max", sim.t_max, "number of steps");
    sub_sim->add_option("--seed", sim.seed, "64-bit seed");
    sub_sim->add_option("--format", sim.format, "csv or json");
    sub_sim->add_option("--out", out_path, "output file (default stdout)");

    auto* sub_rate = app.add_subcommand("rate", "Monte Carlo rate experiment");
    sub_rate->add_option("--model", rate.model, "model id");
    sub_rate->add_option("--theta", rate.theta, "true parameter");
    sub_rate->add_option("--theta0", rate.theta0, "initial estimate");
    sub_rate->add_option("--t-max", rate.t_max, "steps per replication");
    sub_rate->add_option("--reps", rate.reps, "replications (>= 30)");
    sub_rate->add_option("--checkpoints", checkpoints_arg, "comma-separated step indices");
    sub_rate->add_option("--delta", rate.delta, "rate exponent in ]0, 1/2[");
    sub_rate->add_option("--seed", rate.seed, "master seed");
    sub_rate->add_option("--threads", rate.threads, "worker threads (0: RECEST_THREADS/hardware)");
    sub_rate->add_option("--a-choice", rate.a_choice, "a_t choice: t or H");
    sub_rate->add_option("--format", rate.format, "json report or csv raw matrix");
    sub_rate->add_option("--out", out_path, "output file (default stdout)");

    auto* sub_check = app.add_subcommand("check", "verify a hypothesis set numerically");
    sub_check->add_option("--model", check.model, "model id");
    sub_check->add_option("--condition", check.condition, "B1, B2, M, R, or G");
    sub_check->add_option("--c", check.c, "scalar C matrix (B1)");
    sub_check->add_option("--u-min", check.u_min, "grid lower bound (default -u-max)");
    sub_check->add_option("--u-max", check.u_max, "grid upper bound");
    sub_check->add_option("--grid-n", check.grid_n, "grid points");
    sub_check->add_option("--bound", check.bound, "B2 finiteness bound");
    sub_check->add_option("--theta", check.theta, "true parameter (trajectory checks)");
    sub_check->add_option("--theta0", check.theta0, "initial estimate (trajectory checks)");
    sub_check->add_option("--t-max", check.t_max, "trajectory length (M, R, G)");
    sub_check->add_option("--seed", check.seed, "trajectory seed (M, R, G)");
    sub_check->add_option("--epsilon", check.epsilon, "epsilon for R3/G in (0,1)");
    sub_check->add_option("--eps-tilde", check.eps_tilde, "lambda_t margin (additive R)");
    sub_check->add_option("--out", out_path, "output file (default stdout)");

    auto* sub_oracle = app.add_subcommand("oracle", "closed form vs quadrature");
    sub_oracle->add_option("--model", oracle.model, "model id");
    sub_oracle->add_option("--quantity", oracle.quantity, "b or m2");
    sub_oracle->add_option("--u", oracle.u, "perturbation");
    sub_oracle->add_option("--tol", oracle.tol, "comparison tolerance");
    sub_oracle->add_option("--out", out_path, "output file (default stdout)");

    auto* sub_ktrace = app.add_subcommand("ktrace", "K_t / script-N trace along a trajectory");
    sub_ktrace->add_option("--model", ktrace.model, "model id");
    sub_ktrace->add_option("--theta", ktrace.theta, "true parameter");
    sub_ktrace->add_option("--theta0", ktrace.theta0, "initial estimate");
    sub_ktrace->add_option("--t-max", ktrace.t_max, "trajectory length");
    sub_ktrace->add_option("--seed", ktrace.seed, "seed");
    sub_ktrace->add_option("--delta", ktrace.delta, "C_t = C a_t^{2 delta}, delta in [0, 1/2)");
    sub_ktrace->add_option("--c", ktrace.c, "scalar C matrix");
    sub_ktrace->add_option("--a-choice", ktrace.a_choice, "a_t choice: t or H");
    sub_ktrace->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (!checkpoints_arg.empty()) {
        rate.checkpoints.clear();
        std::size_t pos = 0;
        try {
            while (pos < checkpoints_arg.size()) {
                std::size_t used = 0;
                rate.checkpoints.push_back(std::stol(checkpoints_arg.substr(pos), &used));
                pos += used;
                if (pos < checkpoints_arg.size()) {
                    if (checkpoints_arg[pos] != ',') throw std::invalid_argument("bad separator");
                    ++pos;
                }
            }
        } catch (const std::exception&) {
            return usage_error("rate: --checkpoints must be comma-separated integers");
        }
    }

    std::string out;
    int code = kExitUsage;
    try {
        if (*sub_sim) code = run_simulate(sim, out);
        else if (*sub_rate) code = run_rate(rate, out);
        else if (*sub_check) code = run_check(check, out);
        else if (*sub_oracle) code = run_oracle(oracle, out);
        else if (*sub_ktrace) code = run_ktrace(ktrace, out);
    } catch (const std::exception& e) {
        std::fputs((std::string("error: ") + e.what() + "\n").c_str(), stderr);
        return kExitNumeric;
    }
    // Condition reports are written even when the verdict fails (exit 2).
    if (code == kExitOk || code == kExitViolated) {
        const int write_code = write_output(out_path, out);
        if (write_code != kExitOk) return write_code;
    }
    return code;
}

} // namespace recest::cli
