#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fmcf/flow.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/weights.hpp"

namespace fmcf {

inline constexpr double kStrictConvexity = 1e-12;
inline constexpr int kScanPoints = 2001;

/// One (node, time) evaluation of the differential Harnack quantity
/// Z(V) = dt_H_f + 2 grad_H_f V + h V^2 for a unit-speed tangent component V.
struct HarnackSample {
    int node_id = -1;
    double t = 0.0;
    double dt_H_f = 0.0;
    double grad_H_f = 0.0;  ///< arclength derivative of H_f
    double h = 0.0;         ///< second fundamental form on the unit tangent
    double H_f = 0.0;
    double z_min = 0.0;     ///< inf over V (grid scan when not strictly convex)
    double v_star = 0.0;
    double variant_offset = 0.0;
    bool strictly_convex = true;

    double value() const { return z_min + variant_offset; }
};

double harnack_quantity(double dt_H_f, double grad_H_f, double h, double v);

/// Same quantity read off a geometry stack at `node`.
double harnack_quantity(const GeometryStack& stack, std::span<const double> dt_H_f, std::size_t node, double v);

/// Analytic minimum dt_H_f - grad_H_f^2 / h at v* = -grad_H_f / h when
/// h > 1e-12; otherwise a 2001-point scan of [-V_max, V_max] with
/// V_max = 10 (1 + |grad_H_f| / max(|h|, 1e-12)).
HarnackSample harnack_min(double dt_H_f, double grad_H_f, double h);

HarnackSample harnack_min(const GeometryStack& stack, std::span<const double> dt_H_f, std::size_t node);

enum class HarnackVariant { plain, hamilton_2t, general_c };

std::string to_string(HarnackVariant v);
HarnackVariant harnack_variant_from_string(const std::string& s);

/// Piecewise-linear positive function of time, held constant outside its knots.
class TimeTable {
public:
    TimeTable() = default;
    explicit TimeTable(std::vector<std::pair<double, double>> knots);

    double operator()(double t) const;
    bool empty() const { return knots_.empty(); }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

struct HarnackFlags {
    bool weakly_convex_initial = false;
    bool initial_Z_nonneg = false;
    bool third_derivative_zero = false;
    bool initial_H_f_nonneg = false;  ///< extra hypothesis of the time-weighted variants
};

struct HarnackTimeSummary {
    double t = 0.0;
    double global_min = 0.0;
    std::size_t violations = 0;
};

struct HarnackReport {
    HarnackVariant variant = HarnackVariant::plain;
    std::vector<HarnackSample> samples;
    double global_min = 0.0;  ///< min of z_min + variant_offset over samples
    std::vector<HarnackSample> violations;
    double tol = 0.0;
    double initial_min = 0.0;  ///< min z_min on the initial snapshot (one-sided time difference)
    HarnackFlags flags;
    bool vacuous = false;
    std::size_t non_strict_samples = 0;
    std::vector<HarnackTimeSummary> per_time;

    /// Passes when vacuous or free of violations.
    bool passed() const { return vacuous || violations.empty(); }
};

/// tol = 0.05 max(1, max|dt H_f|) (N^-2 + dt) * tol_scale, with dt the
/// largest snapshot spacing of the trace.
double harnack_tolerance(const FlowTrace& trace, double max_abs_dt_H_f, double tol_scale = 1.0);

/// Time derivative of H_f along material nodes at snapshot k: centered for
/// interior snapshots, second-order one-sided at the ends.
std::vector<double> snapshot_dt_H_f(const FlowTrace& trace, std::size_t k);

/// Evaluates the Harnack quantity on every interior snapshot of `trace`.
/// Throws InputError for traces shorter than three snapshots or recorded with
/// redistribution; ConfigError when `c_of_t` is missing or not positive.
HarnackReport verify_differential_harnack(const FlowTrace& trace, const Weight& w, HarnackVariant variant,
                                          const std::optional<TimeTable>& c_of_t = std::nullopt,
                                          double tol_scale = 1.0);

struct IntegralPair {
    int node_id_1 = 0;
    double t1 = 0.0;
    int node_id_2 = 0;
    double t2 = 0.0;
};

struct IntegralHarnackCheck {
    IntegralPair pair;
    double delta_bound = 0.0;  ///< d^2(x1, x2_hat, t1) / (t2 - t1)
    double lhs = 0.0;          ///< log H_f(x2, t2) - log H_f(x1, t1)
    double rhs = 0.0;          ///< -(C/4) delta_bound + time_term
    double time_term = 0.0;    ///< log sqrt(t1/t2) for the time-weighted form, else 0
    double margin = 0.0;       ///< lhs - rhs
    double tol = 0.0;          ///< (0.05 |rhs| + 1e-6) * tol_scale
    bool vacuous = false;
    bool passed = false;
    std::string note;
};

/// Checks H_f(x2,t2)/H_f(x1,t1) >= e^{-C Delta / 4} with Delta bounded by the
/// intrinsic distance at t1 between node_id_1 and the material point node_id_2.
/// With `time_weighted`, the right-hand side carries the extra factor
/// sqrt(t1/t2). Checks are vacuous unless `hypotheses_met` and both H_f > 0.
std::vector<IntegralHarnackCheck> verify_integral_harnack(const FlowTrace& trace, const Weight& w,
                                                          std::span<const IntegralPair> pairs, double C,
                                                          bool hypotheses_met, bool time_weighted = false,
                                                          double tol_scale = 1.0);

/// Deterministic sample of `count` pairs drawn from the trace's snapshots
/// (splitmix64 stream seeded by `seed`). Half are same-node pairs.
std::vector<IntegralPair> sample_integral_pairs(const FlowTrace& trace, std::size_t count, std::uint64_t seed);

nlohmann::json to_json(const HarnackSample& s);
nlohmann::json to_json(const HarnackReport& r);
nlohmann::json to_json(const IntegralHarnackCheck& c);

/// CSV `t,global_min_at_t,violations_at_t`.
std::string harnack_summary_csv(const HarnackReport& r);

}  // namespace fmcf
