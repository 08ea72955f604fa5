#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmcf/curve.hpp"
#include "fmcf/errors.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/weights.hpp"

namespace fmcf {

enum class Scheme { explicit_euler, rk4 };
enum class Redistribution { none, tangential_uniform };

std::string to_string(Scheme s);
std::string to_string(Redistribution r);

/// Early-termination triggers. Sign tolerances are relative to the initial
/// maximum magnitude of the monitored quantity; the pinch tolerance is
/// relative to C^2 computed on the initial curve.
struct StopOn {
    bool hf_negative = false;
    double hf_tol = 1e-6;
    bool h_negative = false;
    double h_tol = 1e-6;
    bool pinch_exceeds = false;
    double pinch_tol = 0.05;
};

struct FlowConfig {
    Scheme scheme = Scheme::rk4;
    std::optional<double> dt;  ///< fixed step; nullopt selects the automatic step
    double cfl = 0.2;
    double t_end = 0.0;
    Redistribution redistribution = Redistribution::none;
    int redistribute_every = 10;
    int record_every = 1;
    StopOn stop_on;
    std::size_t max_steps = 5'000'000;

    /// Throws ConfigError naming the offending `flow.*` field.
    void validate(double t_start = 0.0) const;
};

FlowConfig flow_config_from_json(const nlohmann::json& spec, const std::string& path = "flow");
nlohmann::json to_json(const FlowConfig& cfg);

/// Per-step extrema. "h" is the second fundamental form on the unit tangent,
/// which for curves equals H.
struct Monitor {
    double t = 0.0;
    double min_H_f = 0.0;
    int min_H_f_node = -1;
    double max_abs_H_f = 0.0;
    double min_h = 0.0;
    int min_h_node = -1;
    double max_abs_h = 0.0;
    double max_pinch = 0.0;  ///< max |h|^2 / H_f^2 over nodes (inf if H_f vanishes)
    HessianBounds bounds;
    bool third_derivative_zero = true;
};

Monitor make_monitor(const DiscreteCurve& curve, const GeometryStack& geo, const Weight& w);

struct Snapshot {
    DiscreteCurve curve;
    GeometryStack geometry;
};

struct FlowTrace {
    std::vector<Snapshot> snapshots;
    std::vector<Monitor> monitors;  ///< one per accepted step, plus the initial state
    Redistribution redistribution = Redistribution::none;
    bool third_derivative_zero = true;
    std::size_t steps = 0;
    double min_dt = 0.0;
    double max_dt = 0.0;
    std::string stop_reason;  ///< "t_end" or the stop_on trigger name

    double t_begin() const { return snapshots.front().curve.time; }
    double t_end() const { return snapshots.back().curve.time; }

    /// Index of the snapshot whose time equals `t` within 1e-9 * max(1, |t|).
    std::optional<std::size_t> find_time(double t) const;

    /// Largest spacing between consecutive snapshot times.
    double max_snapshot_spacing() const;
};

/// Raised when a step leaves the mesh guards or violates dt max|H_f| < min spacing.
class StepRejected : public Error {
public:
    StepRejected(const std::string& what, double dt) : Error(what), dt_(dt) {}
    double dt() const noexcept { return dt_; }

private:
    double dt_;
};

/// A step failure inside `run`, carrying everything recorded up to it.
class RunError : public Error {
public:
    RunError(const std::string& what, FlowTrace partial) : Error(what), partial_(std::move(partial)) {}
    const FlowTrace& partial() const noexcept { return partial_; }

private:
    FlowTrace partial_;
};

/// Normal velocity -H_f N at every node.
std::vector<Vec2> flow_velocity(const DiscreteCurve& curve, const Weight& w);

/// cfl * min(ds_min^2, ds_min / max|H_f|).
double auto_dt(const DiscreteCurve& curve, const GeometryStack& geo, double cfl);

/// One step with an explicit step size. Node ids are preserved.
DiscreteCurve step(const DiscreteCurve& curve, const Weight& w, Scheme scheme, double dt);

/// One step with cfg.dt or the automatic step size.
DiscreteCurve step(const DiscreteCurve& curve, const Weight& w, const FlowConfig& cfg);

/// Integrates to cfg.t_end (or a stop trigger), recording snapshots every
/// `record_every` steps plus the first and last state.
FlowTrace run(const DiscreteCurve& initial, const Weight& w, const FlowConfig& cfg);

/// Weights of the second-order three-point derivative at the middle of
/// (t0, t1, t2), valid for unequal spacing.
std::array<double, 3> centered_time_weights(double t0, double t1, double t2);

/// Weights of the second-order one-sided derivative at t0 from (t0, t1, t2).
std::array<double, 3> forward_time_weights(double t0, double t1, double t2);

struct SignViolation {
    std::string quantity;  ///< "H_f" or "h"
    double t = 0.0;
    int node_id = -1;
    double value = 0.0;
};

struct SignReport {
    bool hf_preserved = false;
    bool h_preserved = false;
    bool hf_vacuous = false;  ///< min H_f(0) < -tol: nothing to preserve
    bool h_vacuous = false;   ///< min h(0) < -tol or third derivative nonzero
    double hf_tol = 0.0;
    double h_tol = 0.0;
    double min_H_f = 0.0;
    double min_h = 0.0;
    std::optional<SignViolation> first_violation;
};

/// Positivity of H_f and convexity along a trace, with tolerances
/// rel_tol * (initial max of the same quantity).
SignReport sign_monitors(const FlowTrace& trace, double rel_tol = 1e-6);

struct PinchReport {
    double C_squared = 0.0;  ///< sup_{M0} |h|^2 / inf_{M0} H_f^2
    double sup_ratio = 0.0;  ///< max over trace of max node |h|^2 / H_f^2
    double inf_H_f0 = 0.0;
    double sup_h2_0 = 0.0;
    HessianBounds bounds;  ///< lambda, mu over the initial curve
    bool hypotheses_met = false;
    bool passed = false;  ///< sup_ratio <= C^2 (1 + tol); only meaningful if hypotheses_met
    double tol = 0.05;
    std::string note;
};

PinchReport pinch_monitor(const FlowTrace& trace, const Weight& w, double tol = 0.05);

/// Max-norm residuals of the four evolution equations over interior snapshots.
struct ResidualSet {
    double metric = 0.0;  ///< D_t g + 2 H_f h
    double normal = 0.0;  ///< |D_t N - grad H_f|
    double H_f = 0.0;     ///< D_t H_f - (L H_f + (|h|^2 + Hess f(N,N)) H_f)
    double sff = 0.0;     ///< D_t h - (nabla nabla H_f - H_f h h)
};

struct ResidualRow {
    double t = 0.0;
    ResidualSet max;
};

/// Per interior snapshot residual maxima. Requires redistribution = none and
/// at least three snapshots.
std::vector<ResidualRow> evolution_residuals(const FlowTrace& trace, const Weight& w);

/// Componentwise max over rows.
ResidualSet max_residuals(const std::vector<ResidualRow>& rows);

}  // namespace fmcf
