#include "fmcf/oracles.hpp"

#include <cmath>
#include <limits>

#include "fmcf/errors.hpp"
#include "fmcf/format.hpp"

namespace fmcf {

void RadialSolution::validate() const {
    if (n < 1) throw InputError("radial solution needs n >= 1");
    if (!(R0 > 0.0)) throw InputError("radial solution needs R0 > 0");
    if (!std::isfinite(c)) throw InputError("radial solution needs finite c");
}

RadialSolution::Kind RadialSolution::kind() const {
    const double nd = static_cast<double>(n);
    if (c > 0.0) {
        const double diff = c * R0 * R0 - nd;
        if (diff == 0.0) return Kind::stationary;
        return diff > 0.0 ? Kind::expanding : Kind::shrinking;
    }
    return Kind::shrinking;
}

std::optional<double> RadialSolution::extinction_time() const {
    validate();
    const double nd = static_cast<double>(n);
    if (c == 0.0) return R0 * R0 / (2.0 * nd);
    if (kind() != Kind::shrinking) return std::nullopt;
    // R^2 = 0  <=>  e^{2ct} = n / (n - c R0^2)
    return std::log(nd / (nd - c * R0 * R0)) / (2.0 * c);
}

double RadialSolution::radius_squared(double t) const {
    validate();
    const double nd = static_cast<double>(n);
    double r2 = 0.0;
    if (c == 0.0) {
        r2 = R0 * R0 - 2.0 * nd * t;
    } else {
        const double eq = nd / c;
        r2 = eq + (R0 * R0 - eq) * std::exp(2.0 * c * t);
    }
    if (!(r2 > 0.0)) {
        const double te = extinction_time().value_or(std::numeric_limits<double>::quiet_NaN());
        throw DomainError("radial solution queried at t = " + std::to_string(t) +
                              " past extinction at t = " + std::to_string(te),
                          te);
    }
    return r2;
}

double RadialSolution::radius(double t) const { return std::sqrt(radius_squared(t)); }

double RadialSolution::H_f(double t) const {
    const double r = radius(t);
    return static_cast<double>(n) / r - c * r;
}

double RadialSolution::dt_H_f(double t) const {
    const double r = radius(t);
    const double nd = static_cast<double>(n);
    return (nd / (r * r) + c) * (nd / r - c * r);
}

double radial_solution(int n, double R0, double c, double t) {
    return RadialSolution{n, R0, c}.radius(t);
}

double radial_harnack(int n, double R0, double c, double t) {
    return RadialSolution{n, R0, c}.dt_H_f(t);
}

ConvergenceOrder convergence_order(std::span<const std::pair<double, double>> samples, bool resolution_is_step) {
    if (samples.size() < 3) throw InputError("convergence_order needs at least three samples");
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const bool refines = resolution_is_step ? samples[k].first < samples[k - 1].first
                                                : samples[k].first > samples[k - 1].first;
        if (!refines) throw InputError("convergence_order needs monotone refinement");
    }
    for (const auto& [res, err] : samples) {
        if (!(res > 0.0) || !(err > 0.0)) throw InputError("convergence_order needs positive values");
    }

    ConvergenceOrder out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double x = std::log(samples[k].first);
        const double y = std::log(samples[k].second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        if (k > 0 && !(samples[k].second < samples[k - 1].second)) out.monotone = false;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.order = resolution_is_step ? slope : -slope;
    return out;
}

std::string oracle_table_csv(const std::vector<OracleRow>& rows) {
    std::string out = "t,R_exact,R_sim,abs_err\n";
    for (const auto& r : rows) {
        out += format_double(r.t) + ',' + format_double(r.R_exact) + ',' + format_double(r.R_sim) + ',' +
               format_double(r.abs_err) + '\n';
    }
    return out;
}

}  // namespace fmcf
