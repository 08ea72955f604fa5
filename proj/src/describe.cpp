#include <map>

#include "fmcf/errors.hpp"
#include "fmcf/scenario.hpp"

namespace fmcf {

namespace {

const std::map<std::string, std::string>& texts() {
    static const std::map<std::string, std::string> t = {
        {"signs",
         "signs: sign preservation along the f-mean curvature flow.\n"
         "Statement: if H_f >= 0 on the initial curve then H_f >= 0 for all later times; if in addition the\n"
         "initial curve is weakly convex, h >= 0 remains nonnegative for all later times.\n"
         "Hypotheses:\n"
         "  - min H_f(0) >= -tol (else the H_f part is vacuous)\n"
         "  - min h(0) >= -tol and D^3 f = 0 (else the h part is vacuous)\n"
         "Tolerance: rel_tol (default 1e-6) times the initial max of the same quantity.\n"},
        {"pinch",
         "pinch: curvature pinching bound.\n"
         "Statement: there is a constant C, depending only on the initial curve, with |h|^2 <= C^2 H_f^2\n"
         "for all later times, C^2 = sup_{M0} |h|^2 / inf_{M0} H_f^2.\n"
         "Hypotheses:\n"
         "  - D^3 f = 0\n"
         "  - inf H_f > 0 on the initial curve\n"
         "  - inf H_f + λ − 2μ ≤ 0, with λ, μ the max and min of the tangential Hessian of f on M0\n"
         "Check: sup over the trace of max |h|^2 / H_f^2 <= C^2 (1 + tol), tol default 0.05.\n"},
        {"differential_harnack",
         "differential_harnack: pointwise Harnack estimate for H_f.\n"
         "Statement: for any weakly convex solution of the f-mean curvature flow with D^3 f = 0 and\n"
         "Z >= 0 at the initial time,\n"
         "  ∂ₜH_f + 2⟨∇H_f,V⟩ + h(V,V) ≥ 0  for every tangent vector V and all later times.\n"
         "Variants add H_f / (2t) (hamilton_2t) or H_f / c(t) (general_c) to the left-hand side.\n"
         "Hypotheses:\n"
         "  - initial curve weakly convex (h >= 0)\n"
         "  - D^3 f = 0\n"
         "  - min over V of Z(V) >= 0 on the initial curve\n"
         "  - H_f >= 0 initially (time-weighted variants)\n"
         "Check: global min of z_min over interior snapshots >= -tol_H,\n"
         "tol_H = 0.05 max(1, max|∂ₜH_f|) (N^-2 + dt).\n"},
        {"integral_harnack",
         "integral_harnack: space-time comparison of H_f.\n"
         "Statement: H_f(x2, t2) >= H_f(x1, t1) exp(-C Δ / 4), where Δ is the infimum over all paths\n"
         "joining the two space-time points of the path energy; here Δ <= d_{t1}(x1, x2)^2 / (t2 - t1).\n"
         "The time-weighted form carries an extra factor sqrt(t1 / t2).\n"
         "Hypotheses:\n"
         "  - all pinch hypotheses (including inf H_f + λ − 2μ ≤ 0)\n"
         "  - all differential_harnack hypotheses\n"
         "  - H_f > 0 at both points\n"
         "Check: margin = lhs - rhs >= -(0.05 |rhs| + 1e-6) for every sampled pair.\n"},
        {"evolution_residuals",
         "evolution_residuals: consistency of the discrete flow with its evolution equations.\n"
         "Statement: along the flow\n"
         "  ∂ₜg = -2 H_f h\n"
         "  ∂ₜN = ∇H_f\n"
         "  ∂ₜH_f = ΔH_f - ⟨∇f, ∇H_f⟩ + (|h|^2 + Hess f(N,N)) H_f\n"
         "  ∂ₜh = ∇∇H_f - H_f h h\n"
         "Hypotheses: none beyond smoothness; needs a fixed dt and material nodes.\n"
         "Check: max-norm residuals shrink by a factor in [3, 5] when N and 1/dt are doubled.\n"},
        {"radial_oracle",
         "radial_oracle: concentric circles under f = c0 + c |x|^2 / 2.\n"
         "Statement: R(t)^2 = 1/c + (R0^2 - 1/c) e^{2ct} (c != 0), R(t)^2 = R0^2 - 2t (c = 0).\n"
         "Hypotheses: circle centered at the origin, centered isotropic quadratic weight.\n"
         "Check: max relative radius error <= tol (default 1e-4).\n"},
    };
    return t;
}

}  // namespace

std::string describe_check(const std::string& name) {
    const auto& t = texts();
    auto it = t.find(name);
    if (it == t.end()) throw InputError("unknown check '" + name + "'");
    return it->second;
}

}  // namespace fmcf
