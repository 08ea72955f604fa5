#include "fmcf/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fmcf/errors.hpp"
#include "fmcf/format.hpp"
#include "rng.hpp"

namespace fmcf {

double harnack_quantity(double dt_H_f, double grad_H_f, double h, double v) {
    return dt_H_f + 2.0 * grad_H_f * v + h * v * v;
}

double harnack_quantity(const GeometryStack& stack, std::span<const double> dt_H_f, std::size_t node, double v) {
    if (node >= stack.size() || dt_H_f.size() != stack.size()) throw InputError("harnack_quantity: bad node");
    return harnack_quantity(dt_H_f[node], stack.dH_f_ds[node], stack.H[node], v);
}

HarnackSample harnack_min(double dt_H_f, double grad_H_f, double h) {
    HarnackSample s;
    s.dt_H_f = dt_H_f;
    s.grad_H_f = grad_H_f;
    s.h = h;
    if (h > kStrictConvexity) {
        s.strictly_convex = true;
        s.v_star = -grad_H_f / h;
        s.z_min = dt_H_f - grad_H_f * grad_H_f / h;
        return s;
    }
    s.strictly_convex = false;
    const double v_max = 10.0 * (1.0 + std::abs(grad_H_f) / std::max(std::abs(h), kStrictConvexity));
    s.z_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScanPoints; ++k) {
        const double v = -v_max + 2.0 * v_max * static_cast<double>(k) / (kScanPoints - 1);
        const double z = harnack_quantity(dt_H_f, grad_H_f, h, v);
        if (z < s.z_min) {
            s.z_min = z;
            s.v_star = v;
        }
    }
    return s;
}

HarnackSample harnack_min(const GeometryStack& stack, std::span<const double> dt_H_f, std::size_t node) {
    if (node >= stack.size() || dt_H_f.size() != stack.size()) throw InputError("harnack_min: bad node");
    HarnackSample s = harnack_min(dt_H_f[node], stack.dH_f_ds[node], stack.H[node]);
    s.H_f = stack.H_f[node];
    return s;
}

std::string to_string(HarnackVariant v) {
    switch (v) {
        case HarnackVariant::plain: return "plain";
        case HarnackVariant::hamilton_2t: return "hamilton_2t";
        case HarnackVariant::general_c: return "general_c";
    }
    return "plain";
}

HarnackVariant harnack_variant_from_string(const std::string& s) {
    if (s == "plain") return HarnackVariant::plain;
    if (s == "hamilton_2t") return HarnackVariant::hamilton_2t;
    if (s == "general_c") return HarnackVariant::general_c;
    throw ConfigError("variant", "expected plain, hamilton_2t or general_c");
}

TimeTable::TimeTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw ConfigError("c_of_t", "needs at least one knot");
    std::sort(knots_.begin(), knots_.end());
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (!(knots_[k].second > 0.0)) throw ConfigError("c_of_t", "values must be positive");
        if (k > 0 && knots_[k].first == knots_[k - 1].first) throw ConfigError("c_of_t", "duplicate knot time");
    }
}

double TimeTable::operator()(double t) const {
    if (knots_.empty()) throw ConfigError("c_of_t", "empty table");
    if (t <= knots_.front().first) return knots_.front().second;
    if (t >= knots_.back().first) return knots_.back().second;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    auto lo = hi - 1;
    const double u = (t - lo->first) / (hi->first - lo->first);
    return (1.0 - u) * lo->second + u * hi->second;
}

double harnack_tolerance(const FlowTrace& trace, double max_abs_dt_H_f, double tol_scale) {
    const double n = static_cast<double>(trace.snapshots.front().curve.size());
    const double dt = trace.max_snapshot_spacing();
    return 0.05 * std::max(1.0, max_abs_dt_H_f) * (1.0 / (n * n) + dt) * tol_scale;
}

std::vector<double> snapshot_dt_H_f(const FlowTrace& trace, std::size_t k) {
    const auto& snaps = trace.snapshots;
    if (snaps.size() < 3) throw InputError("time derivative needs at least three snapshots");
    if (k >= snaps.size()) throw InputError("snapshot index out of range");

    std::size_t i0 = 0;
    std::array<double, 3> wt{};
    if (k == 0) {
        wt = forward_time_weights(snaps[0].curve.time, snaps[1].curve.time, snaps[2].curve.time);
        i0 = 0;
    } else if (k + 1 == snaps.size()) {
        // backward: mirror of the forward stencil
        const auto& a = snaps[k - 2].curve.time;
        const auto& b = snaps[k - 1].curve.time;
        const auto& c = snaps[k].curve.time;
        auto f = forward_time_weights(-c, -b, -a);
        wt = {-f[2], -f[1], -f[0]};
        i0 = k - 2;
    } else {
        wt = centered_time_weights(snaps[k - 1].curve.time, snaps[k].curve.time, snaps[k + 1].curve.time);
        i0 = k - 1;
    }
    const std::size_t n = snaps[k].geometry.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& hf = snaps[i0 + j].geometry.H_f;
        for (std::size_t i = 0; i < n; ++i) out[i] += wt[j] * hf[i];
    }
    return out;
}

namespace {

void require_material_trace(const FlowTrace& trace, const char* what) {
    if (trace.redistribution != Redistribution::none) {
        throw InputError(std::string(what) + " needs a trace recorded without redistribution");
    }
}

}  // namespace

HarnackReport verify_differential_harnack(const FlowTrace& trace, const Weight& w, HarnackVariant variant,
                                          const std::optional<TimeTable>& c_of_t, double tol_scale) {
    if (trace.snapshots.size() < 3) throw InputError("differential Harnack check needs at least three snapshots");
    require_material_trace(trace, "differential Harnack check");
    if (variant == HarnackVariant::general_c && (!c_of_t || c_of_t->empty())) {
        throw ConfigError("c_of_t", "general_c variant needs a positive c(t) table");
    }

    HarnackReport r;
    r.variant = variant;
    r.flags.third_derivative_zero = w.third_derivative_zero() && trace.third_derivative_zero;

    double max_abs_dt = 0.0;

    // initial snapshot, one-sided in time
    const auto& s0 = trace.snapshots.front();
    const auto dt0 = snapshot_dt_H_f(trace, 0);
    r.initial_min = std::numeric_limits<double>::infinity();
    double min_h0 = std::numeric_limits<double>::infinity();
    double max_h0 = 0.0;
    double min_hf0 = std::numeric_limits<double>::infinity();
    double max_hf0 = 0.0;
    for (std::size_t i = 0; i < s0.geometry.size(); ++i) {
        r.initial_min = std::min(r.initial_min, harnack_min(s0.geometry, dt0, i).z_min);
        min_h0 = std::min(min_h0, s0.geometry.H[i]);
        max_h0 = std::max(max_h0, std::abs(s0.geometry.H[i]));
        min_hf0 = std::min(min_hf0, s0.geometry.H_f[i]);
        max_hf0 = std::max(max_hf0, std::abs(s0.geometry.H_f[i]));
        max_abs_dt = std::max(max_abs_dt, std::abs(dt0[i]));
    }

    for (std::size_t k = 1; k + 1 < trace.snapshots.size(); ++k) {
        const auto& snap = trace.snapshots[k];
        const double t = snap.curve.time;
        const auto dt = snapshot_dt_H_f(trace, k);
        const double c = variant == HarnackVariant::general_c ? (*c_of_t)(t) : 0.0;
        for (std::size_t i = 0; i < snap.geometry.size(); ++i) {
            HarnackSample s = harnack_min(snap.geometry, dt, i);
            s.node_id = snap.curve.node_ids[i];
            s.t = t;
            switch (variant) {
                case HarnackVariant::plain: s.variant_offset = 0.0; break;
                case HarnackVariant::hamilton_2t:
                    s.variant_offset = t > 0.0 ? s.H_f / (2.0 * t) : std::numeric_limits<double>::infinity();
                    break;
                case HarnackVariant::general_c: s.variant_offset = s.H_f / c; break;
            }
            max_abs_dt = std::max(max_abs_dt, std::abs(s.dt_H_f));
            if (!s.strictly_convex) ++r.non_strict_samples;
            r.samples.push_back(s);
        }
    }

    r.tol = harnack_tolerance(trace, max_abs_dt, tol_scale);
    r.flags.weakly_convex_initial = min_h0 >= -1e-6 * max_h0;
    r.flags.initial_Z_nonneg = r.initial_min >= -r.tol;
    r.flags.initial_H_f_nonneg = min_hf0 >= -1e-6 * max_hf0;
    r.vacuous = !(r.flags.weakly_convex_initial && r.flags.initial_Z_nonneg && r.flags.third_derivative_zero);
    if (variant != HarnackVariant::plain && !r.flags.initial_H_f_nonneg) r.vacuous = true;

    r.global_min = std::numeric_limits<double>::infinity();
    for (const auto& s : r.samples) {
        r.global_min = std::min(r.global_min, s.value());
        if (s.value() < -r.tol) r.violations.push_back(s);
        if (r.per_time.empty() || r.per_time.back().t != s.t) {
            r.per_time.push_back({s.t, std::numeric_limits<double>::infinity(), 0});
        }
        auto& pt = r.per_time.back();
        pt.global_min = std::min(pt.global_min, s.value());
        if (s.value() < -r.tol) ++pt.violations;
    }
    return r;
}

std::vector<IntegralHarnackCheck> verify_integral_harnack(const FlowTrace& trace, const Weight& w,
                                                          std::span<const IntegralPair> pairs, double C,
                                                          bool hypotheses_met, bool time_weighted,
                                                          double tol_scale) {
    require_material_trace(trace, "integral Harnack check");
    const bool applicable = hypotheses_met && w.third_derivative_zero() && std::isfinite(C);

    std::vector<IntegralHarnackCheck> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!(p.t2 > p.t1)) throw InputError("integral Harnack pair needs t2 > t1");
        if (time_weighted && !(p.t1 > 0.0)) throw InputError("time-weighted integral Harnack needs t1 > 0");
        const auto k1 = trace.find_time(p.t1);
        const auto k2 = trace.find_time(p.t2);
        if (!k1 || !k2) {
            throw InputError("integral Harnack pair time " + format_double(!k1 ? p.t1 : p.t2) +
                             " is not a recorded snapshot");
        }
        const auto& s1 = trace.snapshots[*k1];
        const auto& s2 = trace.snapshots[*k2];
        const std::size_t i1 = s1.curve.index_of(p.node_id_1);
        const std::size_t i2_hat = s1.curve.index_of(p.node_id_2);
        const std::size_t i2 = s2.curve.index_of(p.node_id_2);
        if (i1 == DiscreteCurve::npos || i2_hat == DiscreteCurve::npos || i2 == DiscreteCurve::npos) {
            throw InputError("integral Harnack pair references an unknown node id");
        }

        IntegralHarnackCheck c;
        c.pair = p;
        const double d = intrinsic_distance(s1.curve, i1, i2_hat);
        c.delta_bound = d * d / (p.t2 - p.t1);
        const double hf1 = s1.geometry.H_f[i1];
        const double hf2 = s2.geometry.H_f[i2];
        c.time_term = time_weighted ? 0.5 * std::log(p.t1 / p.t2) : 0.0;
        c.rhs = -(C / 4.0) * c.delta_bound + c.time_term;
        c.tol = (0.05 * std::abs(c.rhs) + 1e-6) * tol_scale;
        if (hf1 > 0.0 && hf2 > 0.0) {
            c.lhs = std::log(hf2) - std::log(hf1);
            c.margin = c.lhs - c.rhs;
            c.passed = c.margin >= -c.tol;
        } else {
            c.lhs = std::numeric_limits<double>::quiet_NaN();
            c.margin = std::numeric_limits<double>::quiet_NaN();
            c.note = "H_f is not positive at both samples";
        }
        if (!applicable) {
            c.vacuous = true;
            if (c.note.empty()) c.note = "hypotheses not met";
        } else if (!(hf1 > 0.0 && hf2 > 0.0)) {
            c.vacuous = true;
        }
        out.push_back(c);
    }
    return out;
}

using detail::splitmix64;

std::vector<IntegralPair> sample_integral_pairs(const FlowTrace& trace, std::size_t count, std::uint64_t seed) {
    const std::size_t k = trace.snapshots.size();
    if (k < 3) throw InputError("pair sampling needs at least three snapshots");
    std::uint64_t state = seed;
    std::vector<IntegralPair> out;
    out.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
        // t1 strictly after the initial snapshot, t2 strictly after t1
        const std::size_t k1 = 1 + splitmix64(state) % (k - 2);
        const std::size_t k2 = k1 + 1 + splitmix64(state) % (k - 1 - k1);
        const auto& c1 = trace.snapshots[k1].curve;
        const int id1 = c1.node_ids[splitmix64(state) % c1.size()];
        const int id2 = m % 2 == 0 ? id1 : c1.node_ids[splitmix64(state) % c1.size()];
        out.push_back({id1, c1.time, id2, trace.snapshots[k2].curve.time});
    }
    return out;
}

nlohmann::json to_json(const HarnackSample& s) {
    return {{"node_id", s.node_id},   {"t", s.t},           {"dt_H_f", s.dt_H_f}, {"grad_H_f", s.grad_H_f},
            {"h", s.h},               {"H_f", s.H_f},       {"z_min", s.z_min},   {"v_star", s.v_star},
            {"variant_offset", s.variant_offset}, {"strictly_convex", s.strictly_convex}};
}

namespace {

nlohmann::json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

nlohmann::json to_json(const HarnackReport& r) {
    nlohmann::json j;
    j["variant"] = to_string(r.variant);
    j["global_min"] = finite_or_string(r.global_min);
    j["tol"] = r.tol;
    j["initial_min"] = finite_or_string(r.initial_min);
    j["vacuous"] = r.vacuous;
    j["passed"] = r.passed();
    j["non_strict_samples"] = r.non_strict_samples;
    j["hypothesis_flags"] = {{"weakly_convex_initial", r.flags.weakly_convex_initial},
                             {"initial_Z_nonneg", r.flags.initial_Z_nonneg},
                             {"third_derivative_zero", r.flags.third_derivative_zero},
                             {"initial_H_f_nonneg", r.flags.initial_H_f_nonneg}};
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& v : r.violations) viol.push_back(to_json(v));
    j["violations"] = std::move(viol);

    // samples are stored column-wise; a row-wise array is several times larger
    nlohmann::json cols;
    std::vector<int> node_id;
    std::vector<double> t, dt, grad, h, hf, zmin, vstar, offset;
    std::vector<bool> strict;
    for (const auto& s : r.samples) {
        node_id.push_back(s.node_id);
        t.push_back(s.t);
        dt.push_back(s.dt_H_f);
        grad.push_back(s.grad_H_f);
        h.push_back(s.h);
        hf.push_back(s.H_f);
        zmin.push_back(s.z_min);
        vstar.push_back(s.v_star);
        offset.push_back(s.variant_offset);
        strict.push_back(s.strictly_convex);
    }
    cols["node_id"] = node_id;
    cols["t"] = t;
    cols["dt_H_f"] = dt;
    cols["grad_H_f"] = grad;
    cols["h"] = h;
    cols["H_f"] = hf;
    cols["z_min"] = zmin;
    cols["v_star"] = vstar;
    cols["variant_offset"] = offset;
    cols["strictly_convex"] = strict;
    j["samples"] = std::move(cols);
    return j;
}

nlohmann::json to_json(const IntegralHarnackCheck& c) {
    return {{"node_id_1", c.pair.node_id_1},
            {"t1", c.pair.t1},
            {"node_id_2", c.pair.node_id_2},
            {"t2", c.pair.t2},
            {"delta_bound", c.delta_bound},
            {"lhs", finite_or_string(c.lhs)},
            {"rhs", c.rhs},
            {"time_term", c.time_term},
            {"margin", finite_or_string(c.margin)},
            {"tol", c.tol},
            {"vacuous", c.vacuous},
            {"passed", c.passed},
            {"note", c.note}};
}

std::string harnack_summary_csv(const HarnackReport& r) {
    std::string out = "t,global_min_at_t,violations_at_t\n";
    for (const auto& p : r.per_time) {
        out += format_double(p.t) + ',' + format_double(p.global_min) + ',' + std::to_string(p.violations) + '\n';
    }
    return out;
}

}  // namespace fmcf
