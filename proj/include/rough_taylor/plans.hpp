#pragma once

#include <string>

#include <json.hpp>

#include "rates.hpp"
#include "serialize.hpp"

namespace rough_taylor {

inline SchemeKind scheme_kind_from_string(const std::string& s) {
    if (s == "euler") return SchemeKind::EULER;
    if (s == "milstein") return SchemeKind::MILSTEIN;
    if (s == "modified_euler") return SchemeKind::MODIFIED_EULER;
    if (s == "complete_taylor") return SchemeKind::COMPLETE_TAYLOR;
    if (s == "incomplete") return SchemeKind::INCOMPLETE;
    if (s == "modified") return SchemeKind::MODIFIED;
    throw config_error("unknown scheme kind: " + s);
}

struct SchemeSelection {
    SchemeKind kind = SchemeKind::EULER;
    int order = 1;
    IndexSet index_set;
    IndexSet correction_set;
};

// Scheme block shared by the solve and rates configs: an explicit index_set, the inline
// "gamma_rho" constructor, or "gamma_theta": {"theta": t, "beta": [...]}.
inline SchemeSelection parse_scheme_block(const nlohmann::json& s, const ExponentVector& hurst, int m) {
    SchemeSelection sel;
    sel.kind = scheme_kind_from_string(s.value("kind", std::string("euler")));
    sel.order = s.value("order", 1);
    if (s.contains("index_set")) sel.index_set = index_set_from_json(s.at("index_set"));
    if (s.contains("correction_set")) sel.correction_set = index_set_from_json(s.at("correction_set"));
    if (s.contains("gamma_rho")) {
        sel.index_set = gamma_rho(s.at("gamma_rho").get<double>(), hurst, m);
        if (sel.kind != SchemeKind::MODIFIED) sel.kind = SchemeKind::INCOMPLETE;
    }
    if (s.contains("gamma_theta")) {
        const auto& g = s.at("gamma_theta");
        sel.index_set =
            gamma_theta(g.at("theta").get<double>(), ExponentVector::holder(g.at("beta").get<std::vector<double>>()), m);
        sel.kind = SchemeKind::INCOMPLETE;
    }
    return sel;
}

inline nlohmann::ordered_json to_json(const ExperimentPlan& plan) {
    nlohmann::ordered_json j;
    j["experiment"] = plan.experiment;
    j["model"] = plan.model;
    if (!plan.model_spec.is_null() && !plan.model_spec.empty()) j["field"] = plan.model_spec;
    j["scheme"] = {{"kind", to_string(plan.scheme)}, {"order", plan.taylor_order}};
    if (!plan.index_set.empty()) j["scheme"]["index_set"] = to_json(plan.index_set);
    if (!plan.correction_set.empty()) j["scheme"]["correction_set"] = to_json(plan.correction_set);
    j["signal"] = {{"m", plan.m},
                   {"hurst", to_json(plan.hurst)},
                   {"component_1_is_time", plan.component_1_is_time},
                   {"T", plan.T}};
    j["y0"] = plan.y0;
    j["n_values"] = plan.n_values;
    j["paths"] = plan.paths;
    j["p"] = plan.p_moment;
    j["seed"] = plan.seed;
    j["ref_n"] = plan.ref_n;
    j["ref_order"] = plan.ref_order;
    j["refine_factor"] = plan.refine_factor;
    j["tolerance"] = plan.tolerance;
    j["reg_offset"] = plan.reg_offset;
    j["alpha"] = plan.alpha;
    return j;
}

// Accepts the full plan schema; the scheme block may carry an explicit index_set, an inline
// "gamma_rho": rate constructor, or "gamma_theta": {"theta": t, "beta": [...]}.
inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
    ExperimentPlan plan;
    plan.experiment = j.value("experiment", std::string("lp"));
    plan.model = j.value("model", std::string("sine_field"));
    if (j.contains("field")) plan.model_spec = j.at("field");

    if (j.contains("signal")) {
        const auto& s = j.at("signal");
        plan.m = s.value("m", 1);
        if (s.contains("hurst"))
            plan.hurst = s.at("hurst").is_object() ? exponent_vector_from_json(s.at("hurst"))
                                                   : ExponentVector::hurst(s.at("hurst").get<std::vector<double>>());
        plan.component_1_is_time = s.value("component_1_is_time", false);
        plan.T = s.value("T", 1.0);
    }

    if (j.contains("scheme")) {
        const auto sel = parse_scheme_block(j.at("scheme"), plan.hurst, plan.m);
        plan.scheme = sel.kind;
        plan.taylor_order = sel.order;
        plan.index_set = sel.index_set;
        plan.correction_set = sel.correction_set;
    }

    if (j.contains("y0")) plan.y0 = j.at("y0").get<Point>();
    if (j.contains("n_values")) plan.n_values = j.at("n_values").get<std::vector<std::uint64_t>>();
    plan.paths = j.value("paths", plan.paths);
    plan.p_moment = j.value("p", plan.p_moment);
    plan.seed = j.value("seed", plan.seed);
    plan.ref_n = j.value("ref_n", plan.ref_n);
    plan.ref_order = j.value("ref_order", plan.ref_order);
    plan.refine_factor = j.value("refine_factor", plan.refine_factor);
    plan.tolerance = j.value("tolerance", plan.tolerance);
    plan.reg_offset = j.value("reg_offset", plan.reg_offset);
    if (j.contains("alpha")) plan.alpha = j.at("alpha").get<MultiIndex>();
    if (j.contains("threads")) plan.threads = j.at("threads").get<int>();
    if (j.contains("moment")) {
        const auto& mspec = j.at("moment");
        plan.moment_gamma = mspec.at("gamma").get<MultiIndex>();
        plan.moment_t = mspec.value("t", 1.0);
        const std::string method = mspec.value("method", std::string("quadrature"));
        if (method == "closed_form")
            plan.moment_method = MomentMethod::CLOSED_FORM;
        else if (method == "monte_carlo")
            plan.moment_method = MomentMethod::MONTE_CARLO;
        else if (method == "quadrature")
            plan.moment_method = MomentMethod::QUADRATURE;
        else
            throw config_error("moment method must be closed_form, quadrature or monte_carlo");
    }
    return plan;
}

// Standard-matrix plans; names are accepted by `rough_taylor rates --plan NAME`.
inline ExperimentPlan make_builtin_plan(const std::string& name) {
    ExperimentPlan p;
    p.model = "sine_field";
    p.m = 1;
    p.y0 = {0.7};
    p.n_values = {64, 128, 256, 512, 1024, 2048};

    if (name == "euler_h07") {
        p.experiment = "lp";
        p.scheme = SchemeKind::EULER;
        p.hurst = ExponentVector::hurst({0.7});
        p.paths = 200;
        p.ref_n = 16384;
        p.tolerance = 0.1;
        p.seed = 101;
        return p;
    }
    if (name == "modified_euler_h07" || name == "modified_euler_h08") {
        p.experiment = "lp";
        p.scheme = SchemeKind::MODIFIED_EULER;
        p.hurst = ExponentVector::hurst({name == "modified_euler_h07" ? 0.7 : 0.8});
        p.paths = 200;
        p.ref_n = 16384;
        p.tolerance = 0.1;
        p.seed = 102;
        return p;
    }
    if (name == "taylor2_h07" || name == "taylor3_h07") {
        p.experiment = "lp";
        p.scheme = SchemeKind::COMPLETE_TAYLOR;
        p.taylor_order = (name == "taylor2_h07") ? 2 : 3;
        p.hurst = ExponentVector::hurst({0.7});
        p.paths = 100;
        p.ref_n = 32768;
        p.tolerance = (p.taylor_order == 2) ? 0.15 : 0.2;
        p.seed = 103;
        return p;
    }
    if (name == "as_taylor2_h07") {
        p.experiment = "as";
        p.scheme = SchemeKind::COMPLETE_TAYLOR;
        p.taylor_order = 2;
        p.hurst = ExponentVector::hurst({0.7});
        p.paths = 100;
        p.ref_n = 16384;
        p.tolerance = 0.15;
        p.seed = 104;
        return p;
    }
    if (name == "nu_jj_h065") {
        p.experiment = "nu";
        p.hurst = ExponentVector::hurst({0.65});
        p.alpha = {1, 1};
        p.paths = 10000;
        p.tolerance = 0.05;
        p.seed = 105;
        return p;
    }
    if (name == "omega_jj_h065" || name == "omega_jj_h085") {
        p.experiment = "omega";
        p.hurst = ExponentVector::hurst({name == "omega_jj_h065" ? 0.65 : 0.85});
        p.alpha = {1, 1};
        p.paths = 10000;
        p.tolerance = 0.07;
        p.seed = 106;
        return p;
    }
    throw config_error("unknown builtin plan: " + name);
}

}  // namespace rough_taylor
