#include "fmcf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "fmcf/errors.hpp"
#include "fmcf/format.hpp"
#include "fmcf/harnack.hpp"
#include "fmcf/oracles.hpp"
#include "json_util.hpp"
#include "rng.hpp"

#ifndef FMCF_SCENARIO_DIR
#define FMCF_SCENARIO_DIR "scenarios"
#endif

namespace fmcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kCheckNames = {"signs", "pinch", "differential_harnack", "integral_harnack",
                                              "evolution_residuals", "radial_oracle"};

bool needs_material_nodes(const std::string& type) {
    return type == "differential_harnack" || type == "integral_harnack" || type == "evolution_residuals";
}

std::string check_path(std::size_t i) { return "checks[" + std::to_string(i) + "]"; }

std::optional<TimeTable> read_time_table(const json& params, const std::string& path) {
    if (!params.contains("c_of_t")) return std::nullopt;
    const auto& v = params.at("c_of_t");
    const std::string p = detail::join(path, "c_of_t");
    std::vector<std::pair<double, double>> knots;
    if (v.is_number()) {
        knots.emplace_back(0.0, detail::as_number(v, p));
    } else if (v.is_array()) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::string kp = p + "[" + std::to_string(k) + "]";
            if (!v[k].is_array() || v[k].size() != 2) throw ConfigError(kp, "expected [t, c]");
            knots.emplace_back(detail::as_number(v[k][0], kp + "[0]"), detail::as_number(v[k][1], kp + "[1]"));
        }
    } else {
        throw ConfigError(p, "expected a number or an array of [t, c]");
    }
    try {
        return TimeTable(std::move(knots));
    } catch (const ConfigError& e) {
        throw ConfigError(p, e.what());
    }
}

std::vector<IntegralPair> read_pairs(const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of pairs");
    std::vector<IntegralPair> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string kp = p + "[" + std::to_string(k) + "]";
        IntegralPair q;
        q.node_id_1 = static_cast<int>(detail::get_integer(v[k], "node_id_1", kp));
        q.t1 = detail::get_number(v[k], "t1", kp);
        q.node_id_2 = static_cast<int>(detail::get_integer(v[k], "node_id_2", kp));
        q.t2 = detail::get_number(v[k], "t2", kp);
        if (!(q.t2 > q.t1)) throw ConfigError(kp, "needs t2 > t1");
        out.push_back(q);
    }
    return out;
}

void validate_check(const Scenario& sc, const CheckSpec& c, std::size_t i) {
    const std::string p = check_path(i);
    const json& prm = c.params;
    if (c.type == "signs") {
        if (detail::get_number_or(prm, "rel_tol", 1e-6, p) <= 0.0)
            throw ConfigError(detail::join(p, "rel_tol"), "must be positive");
    } else if (c.type == "pinch") {
        if (detail::get_number_or(prm, "tol", 0.05, p) < 0.0)
            throw ConfigError(detail::join(p, "tol"), "must be nonnegative");
    } else if (c.type == "differential_harnack") {
        HarnackVariant v;
        try {
            v = harnack_variant_from_string(detail::get_string_or(prm, "variant", "plain", p));
        } catch (const ConfigError& e) {
            throw ConfigError(detail::join(p, "variant"), e.what());
        }
        auto table = read_time_table(prm, p);
        if (v == HarnackVariant::general_c && !table)
            throw ConfigError(detail::join(p, "c_of_t"), "general_c needs a c(t) table");
    } else if (c.type == "integral_harnack") {
        detail::get_bool_or(prm, "time_weighted", false, p);
        if (prm.contains("pairs")) {
            read_pairs(prm.at("pairs"), detail::join(p, "pairs"));
        } else {
            const json sample = prm.value("sample", json::object());
            if (detail::get_integer_or(sample, "count", 32, detail::join(p, "sample")) < 1)
                throw ConfigError(detail::join(p, "sample.count"), "must be positive");
        }
    } else if (c.type == "evolution_residuals") {
        if (!sc.flow.dt) throw ConfigError("flow.dt", "evolution_residuals needs a fixed dt");
        if (sc.curve_spec.value("kind", "") == "nodes")
            throw ConfigError("curve.kind", "evolution_residuals needs an analytic curve to refine");
        if (sc.jitter != 0.0) throw ConfigError("jitter", "evolution_residuals needs an unjittered curve");
        if (prm.contains("band")) {
            const auto& b = prm.at("band");
            const std::string bp = detail::join(p, "band");
            if (!b.is_array() || b.size() != 2) throw ConfigError(bp, "expected [lo, hi]");
            const double lo = detail::as_number(b[0], bp + "[0]");
            const double hi = detail::as_number(b[1], bp + "[1]");
            if (!(lo > 0.0 && hi > lo)) throw ConfigError(bp, "needs 0 < lo < hi");
        }
    } else if (c.type == "radial_oracle") {
        if (sc.curve_spec.value("kind", "") != "circle") throw ConfigError("curve.kind", "radial_oracle needs a circle");
        if (sc.curve_spec.contains("center")) {
            const auto& ctr = sc.curve_spec.at("center");
            if (!ctr.is_array() || ctr.size() != 2 || ctr[0] != 0 || ctr[1] != 0)
                throw ConfigError("curve.center", "radial_oracle needs a circle centered at the origin");
        }
        if (sc.jitter != 0.0) throw ConfigError("jitter", "radial_oracle needs an unjittered circle");
        double cc = 0.0;
        if (!sc.weight.is_centered_isotropic(&cc))
            throw ConfigError("weight", "radial_oracle needs f = c0 + c |x|^2 / 2");
        if (detail::get_number_or(prm, "tol", 1e-4, p) <= 0.0)
            throw ConfigError(detail::join(p, "tol"), "must be positive");
        const RadialSolution sol{1, detail::get_number(sc.curve_spec, "radius", "curve"), cc};
        if (auto te = sol.extinction_time(); te && sc.flow.t_end >= *te)
            throw ConfigError("flow.t_end", "reaches the extinction time " + format_double(*te));
    }
    if (needs_material_nodes(c.type) && sc.flow.redistribution != Redistribution::none)
        throw ConfigError("flow.redistribution", c.type + " needs redistribution = none");
}

// Moves every node along its outward normal by up to `amplitude` times the
// local edge length.
DiscreteCurve jitter_curve(const DiscreteCurve& c, double amplitude, std::uint64_t seed) {
    DiscreteCurve out = c;
    const auto tangents = central_tangents(c);
    std::uint64_t state = seed;
    const double orient = signed_area(c) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double u = 2.0 * detail::uniform01(state) - 1.0;
        const double h = std::min(c.edge_length(i), c.edge_length(c.prev(i)));
        const Vec2 n = orient * Vec2(tangents[i].y(), -tangents[i].x());
        out.nodes[i] += amplitude * u * h * n;
    }
    out.validate();
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("failed writing " + path.string());
}

std::string snapshot_csv(const FlowTrace& trace, std::size_t k) {
    const auto& s = trace.snapshots[k];
    std::vector<double> dt;
    if (trace.snapshots.size() >= 3) dt = snapshot_dt_H_f(trace, k);
    const auto& g = s.geometry;
    std::string out = "node_id,x,y,g,h,H,Hf,dHf_ds,dtHf\n";
    for (std::size_t i = 0; i < s.curve.size(); ++i) {
        const double d = dt.empty() ? std::numeric_limits<double>::quiet_NaN() : dt[i];
        out += std::to_string(s.curve.node_ids[i]) + ',' + format_double(s.curve.nodes[i].x()) + ',' +
               format_double(s.curve.nodes[i].y()) + ',' + format_double(g.metric_g[i]) + ',' +
               format_double(g.sff_h[i]) + ',' + format_double(g.H[i]) + ',' + format_double(g.H_f[i]) + ',' +
               format_double(g.dH_f_ds[i]) + ',' + format_double(d) + '\n';
    }
    return out;
}

std::string monitors_csv(const FlowTrace& trace) {
    std::string out = "t,min_Hf,min_h,max_pinch\n";
    for (const auto& m : trace.monitors) {
        out += format_double(m.t) + ',' + format_double(m.min_H_f) + ',' + format_double(m.min_h) + ',' +
               format_double(m.max_pinch) + '\n';
    }
    return out;
}

std::string residuals_csv(const std::vector<ResidualRow>& rows) {
    std::string out = "t,metric,normal,H_f,sff\n";
    for (const auto& r : rows) {
        out += format_double(r.t) + ',' + format_double(r.max.metric) + ',' + format_double(r.max.normal) + ',' +
               format_double(r.max.H_f) + ',' + format_double(r.max.sff) + '\n';
    }
    return out;
}

json residual_json(const ResidualSet& r) {
    return {{"metric", r.metric}, {"normal", r.normal}, {"H_f", r.H_f}, {"sff", r.sff}};
}

json flags_json(const HarnackFlags& f) {
    return {{"weakly_convex_initial", f.weakly_convex_initial},
            {"initial_Z_nonneg", f.initial_Z_nonneg},
            {"third_derivative_zero", f.third_derivative_zero},
            {"initial_H_f_nonneg", f.initial_H_f_nonneg}};
}

// State shared by the checks of one run; order of evaluation follows the
// scenario's check list.
struct Runner {
    const Scenario& sc;
    const RunOptions& opt;
    const FlowTrace& trace;
    Weight weight;

    Runner(const Scenario& s, const RunOptions& o, const FlowTrace& t, Weight w)
        : sc(s), opt(o), trace(t), weight(std::move(w)) {}

    json harnack_reports = json::object();
    std::string harnack_csv;
    json integral = json::array();
    std::vector<ResidualRow> residual_rows;
    std::vector<OracleRow> oracle_rows;
    std::optional<HarnackReport> plain;
    std::optional<PinchReport> pinch_default;

    const HarnackReport& plain_report() {
        if (!plain) plain = verify_differential_harnack(trace, weight, HarnackVariant::plain, std::nullopt, opt.tol_scale);
        return *plain;
    }

    const PinchReport& pinch_report() {
        if (!pinch_default) pinch_default = pinch_monitor(trace, weight, 0.05 * opt.tol_scale);
        return *pinch_default;
    }

    json signs(const json& prm) {
        const double rel = detail::get_number_or(prm, "rel_tol", 1e-6, "") * opt.tol_scale;
        const SignReport r = sign_monitors(trace, rel);
        json e;
        e["vacuous"] = r.hf_vacuous && r.h_vacuous;
        e["passed"] = (r.hf_vacuous || r.hf_preserved) && (r.h_vacuous || r.h_preserved);
        e["hypothesis_flags"] = {{"initial_H_f_nonneg", !r.hf_vacuous},
                                 {"initial_h_nonneg_and_third_derivative_zero", !r.h_vacuous}};
        e["H_f"] = {{"vacuous", r.hf_vacuous}, {"preserved", r.hf_preserved}, {"min", r.min_H_f}, {"tol", r.hf_tol}};
        e["h"] = {{"vacuous", r.h_vacuous}, {"preserved", r.h_preserved}, {"min", r.min_h}, {"tol", r.h_tol}};
        if (r.first_violation) {
            const auto& v = *r.first_violation;
            e["first_violation"] = {{"quantity", v.quantity}, {"t", v.t}, {"node_id", v.node_id}, {"value", v.value}};
        }
        return e;
    }

    json pinch(const json& prm) {
        const double tol = detail::get_number_or(prm, "tol", 0.05, "") * opt.tol_scale;
        const PinchReport r = pinch_monitor(trace, weight, tol);
        json e;
        e["vacuous"] = !r.hypotheses_met;
        e["passed"] = !r.hypotheses_met || r.passed;
        e["hypothesis_flags"] = {{"third_derivative_zero", weight.third_derivative_zero()},
                                 {"inf_H_f_positive", r.inf_H_f0 > 0.0},
                                 {"inf_H_f_plus_lambda_minus_2mu_nonpositive",
                                  r.inf_H_f0 + r.bounds.lambda - 2.0 * r.bounds.mu <= 0.0}};
        e["C_squared"] = r.C_squared;
        e["sup_ratio"] = r.sup_ratio;
        e["inf_H_f0"] = r.inf_H_f0;
        e["lambda"] = r.bounds.lambda;
        e["mu"] = r.bounds.mu;
        e["tol"] = r.tol;
        if (!r.note.empty()) e["note"] = r.note;
        return e;
    }

    json differential(const json& prm) {
        const HarnackVariant v = harnack_variant_from_string(detail::get_string_or(prm, "variant", "plain", ""));
        const auto table = read_time_table(prm, "");
        HarnackReport r = v == HarnackVariant::plain ? plain_report()
                                                     : verify_differential_harnack(trace, weight, v, table, opt.tol_scale);
        json e;
        e["variant"] = to_string(v);
        e["vacuous"] = r.vacuous;
        e["passed"] = r.passed();
        e["hypothesis_flags"] = flags_json(r.flags);
        e["global_min"] = r.global_min;
        e["initial_min"] = r.initial_min;
        e["tol"] = r.tol;
        e["violations"] = r.violations.size();
        e["samples"] = r.samples.size();
        e["non_strict_samples"] = r.non_strict_samples;
        harnack_reports[to_string(v)] = to_json(r);
        if (harnack_csv.empty()) harnack_csv = harnack_summary_csv(r);
        return e;
    }

    json integral_check(const json& prm) {
        const bool weighted = detail::get_bool_or(prm, "time_weighted", false, "");
        std::vector<IntegralPair> pairs;
        if (prm.contains("pairs")) {
            pairs = read_pairs(prm.at("pairs"), "pairs");
        } else {
            const json sample = prm.value("sample", json::object());
            const auto count = static_cast<std::size_t>(detail::get_integer_or(sample, "count", 32, "sample"));
            pairs = sample_integral_pairs(trace, count, sc.seed);
        }
        const PinchReport& p = pinch_report();
        const HarnackReport& h = plain_report();
        const bool met = p.hypotheses_met && !h.vacuous;
        const double C = std::sqrt(std::max(p.C_squared, 0.0));
        const auto checks = verify_integral_harnack(trace, weight, pairs, C, met, weighted, opt.tol_scale);

        std::size_t failed = 0, vac = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        json list = json::array();
        for (const auto& c : checks) {
            if (c.vacuous) ++vac;
            else {
                if (!c.passed) ++failed;
                min_margin = std::min(min_margin, c.margin);
            }
            list.push_back(to_json(c));
        }
        integral.push_back({{"time_weighted", weighted}, {"C", C}, {"hypotheses_met", met}, {"checks", list}});

        json e;
        e["vacuous"] = vac == checks.size();
        e["passed"] = failed == 0;
        e["hypothesis_flags"] = {{"pinch_hypotheses", p.hypotheses_met},
                                 {"differential_harnack_hypotheses", !h.vacuous}};
        e["time_weighted"] = weighted;
        e["C"] = C;
        e["pairs"] = checks.size();
        e["vacuous_pairs"] = vac;
        e["failed_pairs"] = failed;
        e["min_margin"] = std::isfinite(min_margin) ? json(min_margin) : json(nullptr);
        return e;
    }

    json residuals(const json& prm) {
        double lo = 3.0, hi = 5.0;
        if (prm.contains("band")) {
            lo = prm.at("band")[0].get<double>();
            hi = prm.at("band")[1].get<double>();
        }
        residual_rows = evolution_residuals(trace, weight);
        const ResidualSet coarse = max_residuals(residual_rows);

        json fine_spec = sc.curve_spec;
        fine_spec["n"] = 2 * sc.curve.size();
        const DiscreteCurve fine_curve = curve_from_json(fine_spec);
        FlowConfig fine_cfg = sc.flow;
        fine_cfg.dt = *sc.flow.dt / 2.0;
        const FlowTrace fine_trace = run(fine_curve, weight, fine_cfg);
        const ResidualSet fine = max_residuals(evolution_residuals(fine_trace, weight));

        const ResidualSet ratio{coarse.metric / fine.metric, coarse.normal / fine.normal, coarse.H_f / fine.H_f,
                                coarse.sff / fine.sff};
        auto in_band = [&](double r) { return r >= lo && r <= hi; };
        json e;
        e["vacuous"] = false;
        e["passed"] = in_band(ratio.metric) && in_band(ratio.normal) && in_band(ratio.H_f) && in_band(ratio.sff);
        e["hypothesis_flags"] = {{"fixed_dt", true}, {"material_nodes", true}};
        e["coarse"] = residual_json(coarse);
        e["fine"] = residual_json(fine);
        e["ratio"] = residual_json(ratio);
        e["band"] = {lo, hi};
        return e;
    }

    json radial(const json& prm) {
        const double tol = detail::get_number_or(prm, "tol", 1e-4, "") * opt.tol_scale;
        double c = 0.0;
        sc.weight.is_centered_isotropic(&c);
        const RadialSolution sol{1, detail::get_number(sc.curve_spec, "radius", "curve"), c};
        double max_rel = 0.0;
        oracle_rows.clear();
        for (const auto& s : trace.snapshots) {
            const double exact = sol.radius(s.curve.time);
            const double sim = mean_radius(s.curve);
            oracle_rows.push_back({s.curve.time, exact, sim, std::abs(sim - exact)});
            max_rel = std::max(max_rel, std::abs(sim - exact) / exact);
        }
        json e;
        e["vacuous"] = false;
        e["passed"] = max_rel <= tol;
        e["hypothesis_flags"] = {{"centered_circle", true}, {"centered_isotropic_weight", true}};
        e["max_rel_error"] = max_rel;
        e["tol"] = tol;
        e["kind"] = sol.kind() == RadialSolution::Kind::shrinking    ? "shrinking"
                    : sol.kind() == RadialSolution::Kind::expanding ? "expanding"
                                                                     : "stationary";
        return e;
    }

    json dispatch(const CheckSpec& c) {
        if (c.type == "signs") return signs(c.params);
        if (c.type == "pinch") return pinch(c.params);
        if (c.type == "differential_harnack") return differential(c.params);
        if (c.type == "integral_harnack") return integral_check(c.params);
        if (c.type == "evolution_residuals") return residuals(c.params);
        if (c.type == "radial_oracle") return radial(c.params);
        throw InputError("unknown check " + c.type);
    }
};

}  // namespace

bool Scenario::has_check(const std::string& type) const {
    return std::any_of(checks.begin(), checks.end(), [&](const CheckSpec& c) { return c.type == type; });
}

const std::vector<std::string>& check_names() { return kCheckNames; }

Scenario parse_scenario(const json& spec) {
    if (!spec.is_object()) throw ConfigError("", "scenario must be a JSON object");
    Scenario sc;
    sc.name = detail::get_string(spec, "name", "");
    static const std::regex safe("[A-Za-z0-9_.-]+");
    if (sc.name.empty() || !std::regex_match(sc.name, safe) || sc.name == "." || sc.name == "..")
        throw ConfigError("name", "must be nonempty and use only letters, digits, '_', '-', '.'");
    sc.description = detail::get_string_or(spec, "description", "", "");

    const long long seed = detail::get_integer_or(spec, "seed", 0, "");
    if (seed < 0) throw ConfigError("seed", "must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(seed);

    sc.curve_spec = detail::require(spec, "curve", "");
    sc.curve = curve_from_json(sc.curve_spec, "curve");
    sc.weight = spec.contains("weight") ? weight_from_json(spec.at("weight"), "weight") : WeightField2::constant();
    sc.flow = flow_config_from_json(detail::require(spec, "flow", ""), "flow");
    sc.flow.validate(sc.curve.time);

    if (spec.contains("jitter")) {
        const auto& j = spec.at("jitter");
        sc.jitter = j.is_object() ? detail::get_number(j, "amplitude", "jitter") : detail::as_number(j, "jitter");
        if (sc.jitter < 0.0 || sc.jitter >= 0.25) throw ConfigError("jitter", "amplitude must lie in [0, 0.25)");
        if (sc.jitter > 0.0) {
            try {
                sc.curve = jitter_curve(sc.curve, sc.jitter, sc.seed);
            } catch (const DegenerateMeshError& e) {
                throw ConfigError("jitter", e.what());
            }
        }
    }

    sc.output_dir = detail::get_string_or(spec, "output_dir", sc.name, "");
    if (sc.output_dir.empty()) throw ConfigError("output_dir", "must be nonempty");
    const long long stride = detail::get_integer_or(spec, "trace_stride", 0, "");
    if (stride < 0) throw ConfigError("trace_stride", "must be nonnegative");
    sc.trace_stride = static_cast<std::size_t>(stride);

    if (spec.contains("checks")) {
        const auto& cs = spec.at("checks");
        if (!cs.is_array()) throw ConfigError("checks", "expected an array");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CheckSpec c;
            if (cs[i].is_string()) {
                c.type = cs[i].get<std::string>();
            } else if (cs[i].is_object()) {
                c.type = detail::get_string(cs[i], "type", check_path(i));
                c.params = cs[i];
                c.params.erase("type");
            } else {
                throw ConfigError(check_path(i), "expected a check name or object");
            }
            if (std::find(kCheckNames.begin(), kCheckNames.end(), c.type) == kCheckNames.end())
                throw ConfigError(check_path(i), "unknown check '" + c.type + "'");
            sc.checks.push_back(std::move(c));
        }
    }
    for (std::size_t i = 0; i < sc.checks.size(); ++i) validate_check(sc, sc.checks[i], i);
    return sc;
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config", "cannot open " + path.string());
    std::stringstream buf;
    buf << f.rdbuf();
    json spec;
    try {
        spec = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        // the parser message carries line and column
        throw ConfigError(path.string(), e.what());
    }
    return parse_scenario(spec);
}

ScenarioResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    if (!(opt.tol_scale > 0.0) || !std::isfinite(opt.tol_scale)) throw ConfigError("tol_scale", "must be positive");
    ScenarioResult res;
    res.out_dir = fs::path(sc.output_dir).is_absolute() ? fs::path(sc.output_dir) : opt.out_root / sc.output_dir;

    const Weight weight(sc.weight);
    json summary;
    summary["scenario"] = sc.name;
    summary["description"] = sc.description;
    summary["seed"] = sc.seed;
    summary["tol_scale"] = opt.tol_scale;
    summary["config"] = {{"curve", sc.curve_spec}, {"weight", to_json(sc.weight)}, {"flow", to_json(sc.flow)},
                         {"jitter", sc.jitter}};

    FlowTrace trace;
    std::string run_error;
    try {
        trace = run(sc.curve, weight, sc.flow);
    } catch (const RunError& e) {
        trace = e.partial();
        run_error = e.what();
    }

    summary["trace"] = {{"steps", trace.steps},
                        {"snapshots", trace.snapshots.size()},
                        {"t_begin", trace.t_begin()},
                        {"t_end", trace.t_end()},
                        {"min_dt", trace.min_dt},
                        {"max_dt", trace.max_dt},
                        {"stop_reason", trace.stop_reason},
                        {"nodes", sc.curve.size()}};
    if (!run_error.empty()) summary["trace"]["error"] = run_error;

    Runner runner(sc, opt, trace, weight);
    bool all_passed = run_error.empty();
    json checks = json::array();
    if (opt.run_checks && run_error.empty()) {
        for (const auto& c : sc.checks) {
            json e = runner.dispatch(c);
            e["type"] = c.type;
            if (!e["passed"].get<bool>()) all_passed = false;
            if (c.type == "differential_harnack" && !summary.contains("harnack")) summary["harnack"] = e;
            checks.push_back(std::move(e));
        }
    }
    summary["checks"] = checks;
    summary["passed"] = all_passed;
    res.exit_code = all_passed ? 0 : 1;
    summary["exit_code"] = res.exit_code;

    if (opt.write_files) {
        const fs::path& d = res.out_dir;
        fs::create_directories(d / "trace");
        for (const auto& old : fs::directory_iterator(d / "trace")) {
            if (old.path().extension() == ".csv") fs::remove(old.path());
        }
        const std::size_t n = trace.snapshots.size();
        const std::size_t stride = sc.trace_stride > 0 ? sc.trace_stride : std::max<std::size_t>(1, (n + 99) / 100);
        for (std::size_t k = 0; k < n; ++k) {
            if (k % stride != 0 && k + 1 != n) continue;
            char name[48];
            std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
            write_text(d / "trace" / name, snapshot_csv(trace, k));
        }
        write_text(d / "monitors.csv", monitors_csv(trace));
        write_text(d / "harnack_report.json", runner.harnack_reports.dump(1) + "\n");
        write_text(d / "harnack_summary.csv",
                   runner.harnack_csv.empty() ? std::string("t,global_min_at_t,violations_at_t\n") : runner.harnack_csv);
        write_text(d / "integral_harnack.json", runner.integral.dump(1) + "\n");
        write_text(d / "residuals.csv", residuals_csv(runner.residual_rows));
        write_text(d / "oracle.csv", oracle_table_csv(runner.oracle_rows));
        write_text(d / "summary.json", dump_summary(summary));
    }
    res.summary = std::move(summary);
    return res;
}

std::string dump_summary(const json& summary) { return summary.dump(2) + "\n"; }

fs::path scenario_dir() {
    if (const char* env = std::getenv("FMCF_SCENARIOS"); env && *env) return env;
    return FMCF_SCENARIO_DIR;
}

std::vector<fs::path> bundled_scenarios() {
    std::vector<fs::path> out;
    const fs::path dir = scenario_dir();
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fmcf
