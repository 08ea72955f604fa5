#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fmcf {

/// Concentric round n-spheres under the flow with f = c |x|^2 / 2.
///
/// H_f = n / R - c R and dR/dt = -H_f, so R^2 obeys dR^2/dt = -2 (n - c R^2):
///   R(t)^2 = n/c + (R0^2 - n/c) e^{2ct}   (c != 0)
///   R(t)^2 = R0^2 - 2 n t                (c == 0)
struct RadialSolution {
    int n = 1;
    double R0 = 1.0;
    double c = 0.0;

    enum class Kind { shrinking, stationary, expanding };

    /// Throws DomainError past extinction.
    double radius(double t) const;
    double radius_squared(double t) const;
    double H_f(double t) const;
    /// d/dt H_f = (n / R^2 + c) (n / R - c R).
    double dt_H_f(double t) const;
    std::optional<double> extinction_time() const;
    Kind kind() const;

    void validate() const;
};

double radial_solution(int n, double R0, double c, double t);
double radial_harnack(int n, double R0, double c, double t);

struct ConvergenceOrder {
    double order = 0.0;
    bool monotone = true;  ///< false raises a warning; the slope is still reported
};

/// Least-squares slope of -log(error) against log(N), or of log(error)
/// against log(dt) when `resolution_is_step` is set. Needs >= 3 points.
ConvergenceOrder convergence_order(std::span<const std::pair<double, double>> samples,
                                   bool resolution_is_step = false);

struct OracleRow {
    double t = 0.0;
    double R_exact = 0.0;
    double R_sim = 0.0;
    double abs_err = 0.0;
};

/// CSV with header `t,R_exact,R_sim,abs_err`.
std::string oracle_table_csv(const std::vector<OracleRow>& rows);

}  // namespace fmcf
