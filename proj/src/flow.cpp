#include "fmcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json_util.hpp"

namespace fmcf {

std::string to_string(Scheme s) {
    return s == Scheme::rk4 ? "rk4" : "explicit_euler";
}

std::string to_string(Redistribution r) {
    return r == Redistribution::none ? "none" : "tangential_uniform";
}

void FlowConfig::validate(double t_start) const {
    if (dt && !(*dt > 0.0)) throw ConfigError("flow.dt", "must be positive or \"auto\"");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("flow.cfl", "must lie in (0, 0.5]");
    if (!(t_end > t_start)) throw ConfigError("flow.t_end", "must exceed the initial time");
    if (record_every < 1) throw ConfigError("flow.record_every", "must be at least 1");
    if (redistribute_every < 1) throw ConfigError("flow.redistribute_every", "must be at least 1");
    if (!(stop_on.hf_tol >= 0.0)) throw ConfigError("flow.stop_on.hf_tol", "must be nonnegative");
    if (!(stop_on.h_tol >= 0.0)) throw ConfigError("flow.stop_on.h_tol", "must be nonnegative");
    if (!(stop_on.pinch_tol >= 0.0)) throw ConfigError("flow.stop_on.pinch_tol", "must be nonnegative");
    if (max_steps == 0) throw ConfigError("flow.max_steps", "must be positive");
}

FlowConfig flow_config_from_json(const nlohmann::json& spec, const std::string& path) {
    using namespace detail;
    if (!spec.is_object()) throw ConfigError(path, "expected an object");
    FlowConfig cfg;

    const std::string scheme = get_string_or(spec, "scheme", "rk4", path);
    if (scheme == "rk4") {
        cfg.scheme = Scheme::rk4;
    } else if (scheme == "explicit_euler") {
        cfg.scheme = Scheme::explicit_euler;
    } else {
        throw ConfigError(join(path, "scheme"), "expected \"rk4\" or \"explicit_euler\"");
    }

    if (spec.contains("dt")) {
        const auto& dt = spec.at("dt");
        if (dt.is_string()) {
            if (dt.get<std::string>() != "auto") throw ConfigError(join(path, "dt"), "expected a number or \"auto\"");
        } else {
            const double v = as_number(dt, join(path, "dt"));
            if (!(v > 0.0)) throw ConfigError(join(path, "dt"), "must be positive or \"auto\"");
            cfg.dt = v;
        }
    }
    cfg.cfl = get_number_or(spec, "cfl", cfg.cfl, path);
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5)) throw ConfigError(join(path, "cfl"), "must lie in (0, 0.5]");
    cfg.t_end = get_number(spec, "t_end", path);

    const std::string redist = get_string_or(spec, "redistribution", "none", path);
    if (redist == "none") {
        cfg.redistribution = Redistribution::none;
    } else if (redist == "tangential_uniform") {
        cfg.redistribution = Redistribution::tangential_uniform;
    } else {
        throw ConfigError(join(path, "redistribution"), "expected \"none\" or \"tangential_uniform\"");
    }
    cfg.redistribute_every = static_cast<int>(get_integer_or(spec, "redistribute_every", 10, path));
    if (cfg.redistribute_every < 1) throw ConfigError(join(path, "redistribute_every"), "must be at least 1");
    cfg.record_every = static_cast<int>(get_integer_or(spec, "record_every", 1, path));
    if (cfg.record_every < 1) throw ConfigError(join(path, "record_every"), "must be at least 1");
    const long long max_steps = get_integer_or(spec, "max_steps", 5'000'000, path);
    if (max_steps < 1) throw ConfigError(join(path, "max_steps"), "must be positive");
    cfg.max_steps = static_cast<std::size_t>(max_steps);

    if (spec.contains("stop_on")) {
        const auto& s = spec.at("stop_on");
        const std::string spath = join(path, "stop_on");
        if (!s.is_object()) throw ConfigError(spath, "expected an object");
        for (auto it = s.begin(); it != s.end(); ++it) {
            const std::string& key = it.key();
            if (key != "hf_negative" && key != "h_negative" && key != "pinch_exceeds") {
                throw ConfigError(join(spath, key), "unknown stop condition");
            }
            const auto& v = it.value();
            // either `true` or an object {"tol": x}
            bool on = false;
            double tol = key == "pinch_exceeds" ? 0.05 : 1e-6;
            if (v.is_boolean()) {
                on = v.get<bool>();
            } else if (v.is_object()) {
                on = get_bool_or(v, "enabled", true, join(spath, key));
                tol = get_number_or(v, "tol", tol, join(spath, key));
                if (!(tol >= 0.0)) throw ConfigError(join(join(spath, key), "tol"), "must be nonnegative");
            } else {
                throw ConfigError(join(spath, key), "expected a boolean or {\"tol\": x}");
            }
            if (key == "hf_negative") {
                cfg.stop_on.hf_negative = on;
                cfg.stop_on.hf_tol = tol;
            } else if (key == "h_negative") {
                cfg.stop_on.h_negative = on;
                cfg.stop_on.h_tol = tol;
            } else {
                cfg.stop_on.pinch_exceeds = on;
                cfg.stop_on.pinch_tol = tol;
            }
        }
    }
    return cfg;
}

nlohmann::json to_json(const FlowConfig& cfg) {
    nlohmann::json j;
    j["scheme"] = to_string(cfg.scheme);
    if (cfg.dt) {
        j["dt"] = *cfg.dt;
    } else {
        j["dt"] = "auto";
    }
    j["cfl"] = cfg.cfl;
    j["t_end"] = cfg.t_end;
    j["redistribution"] = to_string(cfg.redistribution);
    j["redistribute_every"] = cfg.redistribute_every;
    j["record_every"] = cfg.record_every;
    j["stop_on"] = {{"hf_negative", {{"enabled", cfg.stop_on.hf_negative}, {"tol", cfg.stop_on.hf_tol}}},
                    {"h_negative", {{"enabled", cfg.stop_on.h_negative}, {"tol", cfg.stop_on.h_tol}}},
                    {"pinch_exceeds", {{"enabled", cfg.stop_on.pinch_exceeds}, {"tol", cfg.stop_on.pinch_tol}}}};
    return j;
}

std::optional<std::size_t> FlowTrace::find_time(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t - tol,
                               [](const Snapshot& s, double v) { return s.curve.time < v; });
    if (it != snapshots.end() && std::abs(it->curve.time - t) <= tol) {
        return static_cast<std::size_t>(it - snapshots.begin());
    }
    return std::nullopt;
}

double FlowTrace::max_snapshot_spacing() const {
    double out = 0.0;
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        out = std::max(out, snapshots[k].curve.time - snapshots[k - 1].curve.time);
    }
    return out;
}

Monitor make_monitor(const DiscreteCurve& curve, const GeometryStack& geo, const Weight& w) {
    Monitor m;
    m.t = curve.time;
    m.min_H_f = std::numeric_limits<double>::infinity();
    m.min_h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const double hf = geo.H_f[i];
        const double h = geo.H[i];
        if (hf < m.min_H_f) {
            m.min_H_f = hf;
            m.min_H_f_node = curve.node_ids[i];
        }
        if (h < m.min_h) {
            m.min_h = h;
            m.min_h_node = curve.node_ids[i];
        }
        m.max_abs_H_f = std::max(m.max_abs_H_f, std::abs(hf));
        m.max_abs_h = std::max(m.max_abs_h, std::abs(h));
        const double ratio = hf == 0.0 ? std::numeric_limits<double>::infinity() : (h * h) / (hf * hf);
        m.max_pinch = std::max(m.max_pinch, ratio);
    }
    m.bounds = hessian_bounds(w, curve);
    m.third_derivative_zero = w.third_derivative_zero();
    return m;
}

std::vector<Vec2> flow_velocity(const DiscreteCurve& curve, const Weight& w) {
    curve.validate();
    const std::size_t n = curve.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double inv_step2 = 1.0 / (step * step);
    const double orientation = signed_area(curve) >= 0.0 ? 1.0 : -1.0;
    std::vector<Vec2> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& x = curve.nodes[i];
        const Vec2& xp = curve.nodes[curve.next(i)];
        const Vec2& xm = curve.nodes[curve.prev(i)];
        const Vec2 t = (xp - xm).normalized();
        const Vec2 nrm = orientation * Vec2(t.y(), -t.x());
        const double g = (xp - x).norm() * (x - xm).norm() * inv_step2;
        const double h = -nrm.dot(xp - 2.0 * x + xm) * inv_step2;
        const double hf = h / g - w.grad(x).dot(nrm);
        v[i] = -hf * nrm;
    }
    return v;
}

double auto_dt(const DiscreteCurve& curve, const GeometryStack& geo, double cfl) {
    const double ds = min_edge_length(curve);
    double speed = 0.0;
    for (double hf : geo.H_f) speed = std::max(speed, std::abs(hf));
    double dt = ds * ds;
    if (speed > 0.0) dt = std::min(dt, ds / speed);
    return cfl * dt;
}

namespace {

DiscreteCurve displaced(const DiscreteCurve& base, const std::vector<Vec2>& v, double scale) {
    DiscreteCurve out = base;
    for (std::size_t i = 0; i < out.size(); ++i) out.nodes[i] += scale * v[i];
    return out;
}

std::vector<Vec2> stage_velocity(const DiscreteCurve& c, const Weight& w, double dt) {
    try {
        return flow_velocity(c, w);
    } catch (const DegenerateMeshError& e) {
        throw StepRejected(std::string("intermediate stage degenerate: ") + e.what(), dt);
    }
}

}  // namespace

DiscreteCurve step(const DiscreteCurve& curve, const Weight& w, Scheme scheme, double dt) {
    if (!(dt > 0.0)) throw ConfigError("flow.dt", "must be positive");
    const std::size_t n = curve.size();
    const auto k1 = flow_velocity(curve, w);

    DiscreteCurve next = curve;
    if (scheme == Scheme::explicit_euler) {
        next = displaced(curve, k1, dt);
    } else {
        const auto k2 = stage_velocity(displaced(curve, k1, 0.5 * dt), w, dt);
        const auto k3 = stage_velocity(displaced(curve, k2, 0.5 * dt), w, dt);
        const auto k4 = stage_velocity(displaced(curve, k3, dt), w, dt);
        for (std::size_t i = 0; i < n; ++i) {
            next.nodes[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    next.time = curve.time + dt;

    double speed = 0.0;
    for (const auto& v : k1) speed = std::max(speed, v.norm());
    const double ds = min_edge_length(curve);
    if (!(dt * speed < ds)) {
        throw StepRejected("dt * max|H_f| = " + std::to_string(dt * speed) + " exceeds min spacing " +
                               std::to_string(ds),
                           dt);
    }
    try {
        next.validate();
    } catch (const DegenerateMeshError& e) {
        throw StepRejected(std::string("step produced a degenerate mesh: ") + e.what(), dt);
    }
    return next;
}

DiscreteCurve step(const DiscreteCurve& curve, const Weight& w, const FlowConfig& cfg) {
    double dt = 0.0;
    if (cfg.dt) {
        dt = *cfg.dt;
    } else {
        dt = auto_dt(curve, build_geometry(curve, w), cfg.cfl);
    }
    return step(curve, w, cfg.scheme, dt);
}

namespace {

double initial_pinch_bound(const GeometryStack& g0) {
    double inf_hf = std::numeric_limits<double>::infinity();
    double sup_h2 = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
        inf_hf = std::min(inf_hf, g0.H_f[i]);
        sup_h2 = std::max(sup_h2, g0.H[i] * g0.H[i]);
    }
    if (!(inf_hf > 0.0)) return std::numeric_limits<double>::infinity();
    return sup_h2 / (inf_hf * inf_hf);
}

}  // namespace

FlowTrace run(const DiscreteCurve& initial, const Weight& w, const FlowConfig& cfg) {
    cfg.validate(initial.time);

    FlowTrace trace;
    trace.redistribution = cfg.redistribution;
    trace.third_derivative_zero = w.third_derivative_zero();
    trace.min_dt = std::numeric_limits<double>::infinity();

    DiscreteCurve curve = initial;
    GeometryStack geo = build_geometry(curve, w);
    const Monitor m0 = make_monitor(curve, geo, w);
    trace.monitors.push_back(m0);
    trace.snapshots.push_back({curve, geo});

    const double c_squared = initial_pinch_bound(geo);
    const double hf_floor = -cfg.stop_on.hf_tol * m0.max_abs_H_f;
    const double h_floor = -cfg.stop_on.h_tol * m0.max_abs_h;
    const bool hf_armed = cfg.stop_on.hf_negative && m0.min_H_f >= hf_floor;
    const bool h_armed = cfg.stop_on.h_negative && m0.min_h >= h_floor;
    const bool pinch_armed = cfg.stop_on.pinch_exceeds && std::isfinite(c_squared);

    bool last_recorded = true;
    while (curve.time < cfg.t_end) {
        if (trace.steps >= cfg.max_steps) {
            throw RunError("step budget of " + std::to_string(cfg.max_steps) + " exhausted at t = " +
                               std::to_string(curve.time),
                           std::move(trace));
        }
        double dt = cfg.dt ? *cfg.dt : auto_dt(curve, geo, cfg.cfl);
        const double remaining = cfg.t_end - curve.time;
        const bool final_step = dt >= remaining * (1.0 - 1e-12);
        if (final_step) dt = remaining;

        DiscreteCurve next;
        for (int attempt = 0;; ++attempt) {
            try {
                next = step(curve, w, cfg.scheme, dt);
                break;
            } catch (const StepRejected& e) {
                if (cfg.dt || attempt >= 8) {
                    throw RunError(std::string(e.what()) + " at t = " + std::to_string(curve.time),
                                   std::move(trace));
                }
                dt *= 0.5;
            }
        }
        if (final_step && dt == remaining) next.time = cfg.t_end;

        ++trace.steps;
        trace.min_dt = std::min(trace.min_dt, dt);
        trace.max_dt = std::max(trace.max_dt, dt);

        if (cfg.redistribution == Redistribution::tangential_uniform &&
            trace.steps % static_cast<std::size_t>(cfg.redistribute_every) == 0) {
            next = redistribute_uniform(next);
        }

        curve = std::move(next);
        try {
            geo = build_geometry(curve, w);
        } catch (const DegenerateMeshError& e) {
            throw RunError(e.what(), std::move(trace));
        }
        const Monitor m = make_monitor(curve, geo, w);
        trace.monitors.push_back(m);

        std::string trigger;
        if (hf_armed && m.min_H_f < hf_floor) trigger = "hf_negative";
        if (h_armed && m.min_h < h_floor) trigger = "h_negative";
        if (pinch_armed && m.max_pinch > c_squared * (1.0 + cfg.stop_on.pinch_tol)) trigger = "pinch_exceeds";

        const bool record = trace.steps % static_cast<std::size_t>(cfg.record_every) == 0;
        const bool done = !trigger.empty() || curve.time >= cfg.t_end;
        last_recorded = record || done;
        if (last_recorded) trace.snapshots.push_back({curve, geo});
        if (!trigger.empty()) {
            trace.stop_reason = trigger;
            break;
        }
    }
    if (trace.stop_reason.empty()) trace.stop_reason = "t_end";
    if (!std::isfinite(trace.min_dt)) trace.min_dt = 0.0;
    return trace;
}

std::array<double, 3> centered_time_weights(double t0, double t1, double t2) {
    const double a = t1 - t0;
    const double b = t2 - t1;
    return {-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b))};
}

std::array<double, 3> forward_time_weights(double t0, double t1, double t2) {
    const double a = t1 - t0;
    const double b = t2 - t1;
    return {-(2 * a + b) / (a * (a + b)), (a + b) / (a * b), -a / (b * (a + b))};
}

SignReport sign_monitors(const FlowTrace& trace, double rel_tol) {
    if (trace.monitors.empty()) throw InputError("sign_monitors: empty trace");
    const Monitor& m0 = trace.monitors.front();
    SignReport r;
    r.hf_tol = rel_tol * m0.max_abs_H_f;
    r.h_tol = rel_tol * m0.max_abs_h;
    r.hf_vacuous = m0.min_H_f < -r.hf_tol;
    r.h_vacuous = m0.min_h < -r.h_tol || !trace.third_derivative_zero;
    r.min_H_f = m0.min_H_f;
    r.min_h = m0.min_h;

    bool hf_ok = true;
    bool h_ok = true;
    for (const auto& m : trace.monitors) {
        r.min_H_f = std::min(r.min_H_f, m.min_H_f);
        r.min_h = std::min(r.min_h, m.min_h);
        if (hf_ok && m.min_H_f < -r.hf_tol) {
            hf_ok = false;
            if (!r.first_violation || m.t < r.first_violation->t) {
                r.first_violation = SignViolation{"H_f", m.t, m.min_H_f_node, m.min_H_f};
            }
        }
        if (h_ok && m.min_h < -r.h_tol) {
            h_ok = false;
            if (!r.first_violation || m.t < r.first_violation->t) {
                r.first_violation = SignViolation{"h", m.t, m.min_h_node, m.min_h};
            }
        }
    }
    r.hf_preserved = hf_ok;
    r.h_preserved = h_ok;
    return r;
}

PinchReport pinch_monitor(const FlowTrace& trace, const Weight& w, double tol) {
    if (trace.snapshots.empty()) throw InputError("pinch_monitor: empty trace");
    const auto& s0 = trace.snapshots.front();
    PinchReport r;
    r.tol = tol;
    r.bounds = hessian_bounds(w, s0.curve);
    r.inf_H_f0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s0.geometry.size(); ++i) {
        r.inf_H_f0 = std::min(r.inf_H_f0, s0.geometry.H_f[i]);
        r.sup_h2_0 = std::max(r.sup_h2_0, s0.geometry.H[i] * s0.geometry.H[i]);
    }
    for (const auto& m : trace.monitors) r.sup_ratio = std::max(r.sup_ratio, m.max_pinch);

    if (!(r.inf_H_f0 > 0.0)) {
        r.C_squared = std::numeric_limits<double>::infinity();
        r.hypotheses_met = false;
        r.note = "inf H_f on the initial curve is not positive";
        return r;
    }
    r.C_squared = r.sup_h2_0 / (r.inf_H_f0 * r.inf_H_f0);
    const double gap = r.inf_H_f0 + r.bounds.lambda - 2.0 * r.bounds.mu;
    r.hypotheses_met = trace.third_derivative_zero && gap <= 0.0;
    if (!trace.third_derivative_zero) {
        r.note = "weight has nonzero third derivative";
    } else if (gap > 0.0) {
        r.note = "inf H_f + lambda - 2 mu = " + std::to_string(gap) + " > 0";
    }
    r.passed = r.sup_ratio <= r.C_squared * (1.0 + tol);
    return r;
}

std::vector<ResidualRow> evolution_residuals(const FlowTrace& trace, const Weight& w) {
    if (trace.redistribution != Redistribution::none) {
        throw InputError("evolution residuals need a trace without redistribution");
    }
    if (trace.snapshots.size() < 3) throw InputError("evolution residuals need at least three snapshots");
    (void)w;  // the weight enters through the stored H_f and its right-hand side

    std::vector<ResidualRow> rows;
    for (std::size_t k = 1; k + 1 < trace.snapshots.size(); ++k) {
        const auto& a = trace.snapshots[k - 1];
        const auto& s = trace.snapshots[k];
        const auto& c = trace.snapshots[k + 1];
        const auto wt = centered_time_weights(a.curve.time, s.curve.time, c.curve.time);
        const auto& geo = s.geometry;
        const std::size_t n = geo.size();

        const auto dHf_dtheta = param_derivative(geo.H_f, geo.param_step);
        const auto d2Hf_dtheta = param_second_derivative(geo.H_f, geo.param_step);
        const auto dg_dtheta = param_derivative(geo.metric_g, geo.param_step);

        ResidualRow row;
        row.t = s.curve.time;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ga = a.geometry;
            const auto& gc = c.geometry;
            const double dt_g = wt[0] * ga.metric_g[i] + wt[1] * geo.metric_g[i] + wt[2] * gc.metric_g[i];
            const Vec2 dt_n = wt[0] * ga.normal[i] + wt[1] * geo.normal[i] + wt[2] * gc.normal[i];
            const double dt_hf = wt[0] * ga.H_f[i] + wt[1] * geo.H_f[i] + wt[2] * gc.H_f[i];
            const double dt_h = wt[0] * ga.sff_h[i] + wt[1] * geo.sff_h[i] + wt[2] * gc.sff_h[i];

            const double g = geo.metric_g[i];
            const double h = geo.sff_h[i];
            const double hf = geo.H_f[i];
            const double christoffel = 0.5 * dg_dtheta[i] / g;
            const double hess_hf = d2Hf_dtheta[i] - christoffel * dHf_dtheta[i];

            row.max.metric = std::max(row.max.metric, std::abs(dt_g + 2.0 * hf * h));
            row.max.normal = std::max(row.max.normal, (dt_n - geo.dH_f_ds[i] * geo.tangent[i]).norm());
            row.max.H_f = std::max(row.max.H_f, std::abs(dt_hf - geo.dt_H_f_rhs[i]));
            row.max.sff = std::max(row.max.sff, std::abs(dt_h - (hess_hf - hf * h * h / g)));
        }
        rows.push_back(row);
    }
    return rows;
}

ResidualSet max_residuals(const std::vector<ResidualRow>& rows) {
    ResidualSet out;
    for (const auto& r : rows) {
        out.metric = std::max(out.metric, r.max.metric);
        out.normal = std::max(out.normal, r.max.normal);
        out.H_f = std::max(out.H_f, r.max.H_f);
        out.sff = std::max(out.sff, r.max.sff);
    }
    return out;
}

}  // namespace fmcf
