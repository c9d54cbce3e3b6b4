#include "recest/report_io.hpp"

#include <cmath>
#include <stdexcept>

#include "recest/json_writer.hpp"

namespace recest::io {

namespace {

void append_scalar_list(std::string& out, const ParamVec& v) {
    // Scalar models print the single entry; vectors are semicolon separated.
    for (int i = 0; i < v.dim(); ++i) {
        if (i) out += ';';
        out += format_double(v[i]);
    }
}

void append_matrix(std::string& out, const SquareMatrix& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) {
            if (i || j) out += ';';
            out += format_double(m(i, j));
        }
}

} // namespace

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,x,theta_hat,gamma,psi,increment,skipped\n";
    for (const auto& s : trajectory.steps) {
        out += std::to_string(s.t);
        out += ',';
        out += format_double(s.x);
        out += ',';
        append_scalar_list(out, s.theta_hat);
        out += ',';
        append_matrix(out, s.gamma);
        out += ',';
        append_scalar_list(out, s.psi);
        out += ',';
        append_scalar_list(out, s.increment);
        out += ',';
        out += s.skipped ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string trajectory_json(const Trajectory& trajectory) {
    JsonWriter w;
    w.begin_object();
    w.key("spec_version").value(kSpecVersion);
    w.key("model").value(trajectory.scheme_id);
    w.key("seed").value(static_cast<unsigned long long>(trajectory.seed));
    w.key("theta_true").values(trajectory.theta_true.entries());
    w.key("theta0").values(trajectory.theta0.entries());
    w.key("steps").begin_array();
    for (const auto& s : trajectory.steps) {
        w.begin_object();
        w.key("t").value(s.t);
        w.key("x").value(s.x);
        w.key("theta_hat").values(s.theta_hat.entries());
        w.key("gamma").begin_array();
        for (int i = 0; i < s.gamma.dim(); ++i)
            for (int j = 0; j < s.gamma.dim(); ++j) w.value(s.gamma(i, j));
        w.end_array();
        w.key("psi").values(s.psi.entries());
        w.key("increment").values(s.increment.entries());
        w.key("skipped").value(s.skipped);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

std::string rate_report_json(const harness::RateReport& report, const RateMeta& meta) {
    JsonWriter w;
    w.begin_object();
    w.key("spec_version").value(kSpecVersion);
    w.key("model").value(meta.model);
    w.key("theta").value(meta.theta);
    w.key("theta0").value(meta.theta0);
    w.key("seed").value(static_cast<unsigned long long>(meta.seed));
    w.key("reps").value(meta.reps);
    w.key("t_max").value(meta.t_max);
    w.key("delta").value(report.delta);
    w.key("a_choice").value(meta.a_choice);
    w.key("checkpoints").values(report.checkpoints);
    w.key("delta_abs").begin_object();
    w.key("q25").values(report.q25);
    w.key("q50").values(report.q50);
    w.key("q75").values(report.q75);
    w.end_object();
    w.key("scaled").begin_object();
    w.key("q25").values(report.scaled_q25);
    w.key("q50").values(report.scaled_q50);
    w.key("q75").values(report.scaled_q75);
    w.end_object();
    w.key("ratio_kind").value(report.ratio_kind);
    w.key("ratio_median").values(report.ratio_median);
    w.key("slope").value(report.slope);
    w.key("slope_stderr").value(report.slope_stderr);
    w.end_object();
    return w.str() + "\n";
}

std::string ensemble_csv(const harness::Ensemble& ensemble) {
    std::string kind;
    const auto ratios = harness::ensemble_ratios(ensemble, &kind);
    std::string out = "rep,t,delta_abs,scaled,ratio\n";
    for (std::size_t r = 0; r < ensemble.reps.size(); ++r) {
        for (std::size_t c = 0; c < ensemble.reps[r].size(); ++c) {
            const auto& s = ensemble.reps[r][c];
            out += std::to_string(r);
            out += ',';
            out += std::to_string(s.t);
            out += ',';
            out += format_double(s.delta_norm);
            out += ',';
            out += format_double(std::pow(s.a_value, ensemble.cfg.delta) * s.delta_norm);
            out += ',';
            out += format_double(ratios[r][c]);
            out += '\n';
        }
    }
    return out;
}

std::string condition_report_json(const diag::ConditionReport& report) {
    JsonWriter w;
    w.begin_object();
    w.key("spec_version").value(kSpecVersion);
    w.key("condition").value(report.condition);
    w.key("model").value(report.model);
    w.key("verdict").value(report.verdict);
    w.key("region").value(report.region);
    w.key("parameters").begin_object();
    for (const auto& [k, v] : report.parameters) w.key(k).value(v);
    w.end_object();
    w.key("witnesses").begin_array();
    for (const auto& wit : report.witnesses) {
        w.begin_object();
        w.key("where").value(wit.where);
        w.key("lhs").value(wit.lhs);
        w.key("rhs").value(wit.rhs);
        w.key("ok").value(wit.ok);
        w.end_object();
    }
    w.end_array();
    w.key("notes").begin_array();
    for (const auto& n : report.notes) w.value(n);
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

std::string oracle_result_json(const OracleResult& result) {
    JsonWriter w;
    w.begin_object();
    w.key("spec_version").value(kSpecVersion);
    w.key("model").value(result.model);
    w.key("quantity").value(result.quantity);
    w.key("u").value(result.u);
    w.key("closed_form").value(result.closed_form);
    w.key("quadrature").value(result.quadrature);
    w.key("abs_diff").value(result.abs_diff);
    w.key("tol").value(result.tol);
    w.key("ok").value(result.ok);
    w.end_object();
    return w.str() + "\n";
}

std::string ktrace_csv(const diag::KTrace& trace, const std::vector<double>* script_n) {
    if (script_n && script_n->size() != trace.rows.size())
        throw std::invalid_argument("ktrace_csv: scriptN column length mismatch");
    std::string out = "t,V,dV,drift,moment,K,premise_partial_sum";
    if (script_n) out += ",scriptN";
    out += '\n';
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const auto& r = trace.rows[i];
        out += std::to_string(r.t);
        out += ',';
        out += format_double(r.v_cur);
        out += ',';
        out += format_double(r.dv);
        out += ',';
        out += format_double(r.drift);
        out += ',';
        out += format_double(r.moment);
        out += ',';
        out += format_double(r.k);
        out += ',';
        out += format_double(r.premise_partial_sum);
        if (script_n) {
            out += ',';
            out += format_double((*script_n)[i]);
        }
        out += '\n';
    }
    return out;
}

} // namespace recest::io
