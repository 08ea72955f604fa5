#include "fmcf/geometry.hpp"

#include <cmath>
#include <numbers>

#include "fmcf/errors.hpp"

namespace fmcf {

namespace {

void check_length(const DiscreteCurve& curve, std::span<const double> field) {
    if (field.size() != curve.size()) throw InputError("field length does not match node count");
}

}  // namespace

std::vector<Vec2> central_tangents(const DiscreteCurve& curve) {
    const std::size_t n = curve.size();
    std::vector<Vec2> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = (curve.nodes[curve.next(i)] - curve.nodes[curve.prev(i)]).normalized();
    }
    return t;
}

std::vector<double> arclength_derivative(const DiscreteCurve& curve, std::span<const double> field) {
    check_length(curve, field);
    const std::size_t n = curve.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = curve.next(i);
        const std::size_t im = curve.prev(i);
        const double a = curve.edge_length(im);
        const double b = curve.edge_length(i);
        out[i] = (a * a * field[ip] - b * b * field[im] + (b * b - a * a) * field[i]) / (a * b * (a + b));
    }
    return out;
}

std::vector<double> arclength_laplacian(const DiscreteCurve& curve, std::span<const double> field) {
    check_length(curve, field);
    const std::size_t n = curve.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = curve.next(i);
        const std::size_t im = curve.prev(i);
        const double a = curve.edge_length(im);
        const double b = curve.edge_length(i);
        out[i] = 2.0 * (a * field[ip] - (a + b) * field[i] + b * field[im]) / (a * b * (a + b));
    }
    return out;
}

std::vector<double> weighted_laplacian(const DiscreteCurve& curve, std::span<const double> field,
                                       const Weight& w) {
    curve.validate();
    check_length(curve, field);
    const auto tangents = central_tangents(curve);
    auto out = arclength_laplacian(curve, field);
    const auto ds = arclength_derivative(curve, field);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] -= w.grad(curve.nodes[i]).dot(tangents[i]) * ds[i];
    }
    return out;
}

std::vector<double> param_derivative(std::span<const double> field, double step) {
    const std::size_t n = field.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (field[(i + 1) % n] - field[(i + n - 1) % n]) / (2.0 * step);
    }
    return out;
}

std::vector<double> param_second_derivative(std::span<const double> field, double step) {
    const std::size_t n = field.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (field[(i + 1) % n] - 2.0 * field[i] + field[(i + n - 1) % n]) / (step * step);
    }
    return out;
}

GeometryStack build_geometry(const DiscreteCurve& curve, const Weight& w) {
    curve.validate();
    const std::size_t n = curve.size();

    GeometryStack s;
    s.param_step = 2.0 * std::numbers::pi / static_cast<double>(n);
    s.orientation = signed_area(curve) >= 0.0 ? 1 : -1;
    s.tangent = central_tangents(curve);
    s.normal.resize(n);
    s.metric_g.resize(n);
    s.sff_h.resize(n);
    s.H.resize(n);
    s.H_f.resize(n);
    s.hess_f_nn.resize(n);

    const double inv_step2 = 1.0 / (s.param_step * s.param_step);
    std::vector<Vec2> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& x = curve.nodes[i];
        const Vec2& xp = curve.nodes[curve.next(i)];
        const Vec2& xm = curve.nodes[curve.prev(i)];
        const Vec2& t = s.tangent[i];
        const Vec2 nrm = static_cast<double>(s.orientation) * Vec2(t.y(), -t.x());
        s.normal[i] = nrm;
        s.metric_g[i] = (xp - x).norm() * (x - xm).norm() * inv_step2;
        s.sff_h[i] = -nrm.dot(xp - 2.0 * x + xm) * inv_step2;
        s.H[i] = s.sff_h[i] / s.metric_g[i];
        grad[i] = w.grad(x);
        s.H_f[i] = s.H[i] - grad[i].dot(nrm);
        s.hess_f_nn[i] = nrm.dot(w.hessian(x) * nrm);
    }

    s.dH_f_ds = arclength_derivative(curve, s.H_f);
    s.lap_H_f = arclength_laplacian(curve, s.H_f);
    s.L_H_f.resize(n);
    s.dt_H_f_rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.L_H_f[i] = s.lap_H_f[i] - grad[i].dot(s.tangent[i]) * s.dH_f_ds[i];
        const double h_sq = s.H[i] * s.H[i];  // |h|^2 = H^2 for curves
        s.dt_H_f_rhs[i] = s.L_H_f[i] + (h_sq + s.hess_f_nn[i]) * s.H_f[i];
    }
    return s;
}

}  // namespace fmcf
