#include "fmcf/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fmcf/errors.hpp"
#include "fmcf/geometry.hpp"
#include "json_util.hpp"

namespace fmcf {

template <int Dim>
Eigen::MatrixXd tangential_hessian(const WeightField<Dim>& w,
                                   std::span<const typename WeightField<Dim>::Vector> frame) {
    const auto n = static_cast<Eigen::Index>(frame.size());
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            const double expected = a == b ? 1.0 : 0.0;
            if (std::abs(frame[a].dot(frame[b]) - expected) > 1e-12) {
                throw FrameError("tangent frame is not orthonormal at (" + std::to_string(a) + ", " +
                                 std::to_string(b) + ")");
            }
        }
    }
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) out(a, b) = frame[a].dot(w.A * frame[b]);
    }
    return out;
}

template Eigen::MatrixXd tangential_hessian<2>(const WeightField<2>&,
                                               std::span<const WeightField<2>::Vector>);
template Eigen::MatrixXd tangential_hessian<3>(const WeightField<3>&,
                                               std::span<const WeightField<3>::Vector>);

Weight Weight::exploratory(Function f, double fd_step, std::string label) {
    if (!f) throw ConfigError("weight", "exploratory weight needs a callable");
    if (!(fd_step > 0.0)) throw ConfigError("weight.fd_step", "must be positive");
    Weight w;
    w.impl_ = Exploratory{std::move(f), fd_step, std::move(label)};
    return w;
}

double Weight::value(const Vec2& x) const {
    if (const auto* q = quadratic()) return q->value(x);
    return std::get<Exploratory>(impl_).f(x);
}

Vec2 Weight::grad(const Vec2& x) const {
    if (const auto* q = quadratic()) return q->grad(x);
    const auto& e = std::get<Exploratory>(impl_);
    const double h = e.step;
    const Vec2 ex(h, 0.0);
    const Vec2 ey(0.0, h);
    return {(e.f(x + ex) - e.f(x - ex)) / (2 * h), (e.f(x + ey) - e.f(x - ey)) / (2 * h)};
}

Mat2 Weight::hessian(const Vec2& x) const {
    if (const auto* q = quadratic()) return q->A;
    const auto& e = std::get<Exploratory>(impl_);
    const double h = e.step;
    const Vec2 ex(h, 0.0);
    const Vec2 ey(0.0, h);
    const double f0 = e.f(x);
    const double fxx = (e.f(x + ex) - 2 * f0 + e.f(x - ex)) / (h * h);
    const double fyy = (e.f(x + ey) - 2 * f0 + e.f(x - ey)) / (h * h);
    const double fxy =
        (e.f(x + ex + ey) - e.f(x + ex - ey) - e.f(x - ex + ey) + e.f(x - ex - ey)) / (4 * h * h);
    Mat2 m;
    m << fxx, fxy, fxy, fyy;
    return m;
}

std::string Weight::describe() const {
    if (const auto* q = quadratic()) {
        std::ostringstream os;
        os << "quadratic(c0=" << q->c0 << ", b=[" << q->b.x() << ", " << q->b.y() << "], A=[[" << q->A(0, 0)
           << ", " << q->A(0, 1) << "], [" << q->A(1, 0) << ", " << q->A(1, 1) << "]])";
        return os.str();
    }
    return std::get<Exploratory>(impl_).label;
}

HessianBounds hessian_bounds(const Weight& w, const DiscreteCurve& curve) {
    const auto tangents = central_tangents(curve);
    HessianBounds out{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec2& t = tangents[i];
        const double v = t.dot(w.hessian(curve.nodes[i]) * t);
        out.lambda = std::max(out.lambda, v);
        out.mu = std::min(out.mu, v);
    }
    return out;
}

namespace {

template <int Dim>
WeightField<Dim> parse_weight(const nlohmann::json& spec, const std::string& path) {
    if (!spec.is_object()) throw ConfigError(path, "expected an object");
    WeightField<Dim> w;
    w.c0 = detail::get_number_or(spec, "c0", 0.0, path);

    if (spec.contains("b")) {
        const auto& b = spec.at("b");
        const std::string bpath = detail::join(path, "b");
        if (!b.is_array() || b.size() != Dim) {
            throw ConfigError(bpath, "expected " + std::to_string(Dim) + " numbers");
        }
        for (int i = 0; i < Dim; ++i) w.b(i) = detail::as_number(b[i], bpath + "[" + std::to_string(i) + "]");
    }

    if (spec.contains("A")) {
        const auto& a = spec.at("A");
        const std::string apath = detail::join(path, "A");
        if (!a.is_array()) throw ConfigError(apath, "expected an array");
        if (a.size() == Dim * Dim) {
            for (int k = 0; k < Dim * Dim; ++k) {
                w.A(k / Dim, k % Dim) = detail::as_number(a[k], apath + "[" + std::to_string(k) + "]");
            }
        } else if (a.size() == Dim) {
            for (int r = 0; r < Dim; ++r) {
                const std::string rpath = apath + "[" + std::to_string(r) + "]";
                if (!a[r].is_array() || a[r].size() != Dim) throw ConfigError(rpath, "malformed row");
                for (int c = 0; c < Dim; ++c) {
                    w.A(r, c) = detail::as_number(a[r][c], rpath + "[" + std::to_string(c) + "]");
                }
            }
        } else {
            throw ConfigError(apath, "expected " + std::to_string(Dim * Dim) + " row-major entries");
        }
        if (!w.is_symmetric()) throw ConfigError(apath, "matrix is not exactly symmetric");
    }
    return w;
}

}  // namespace

WeightField2 weight_from_json(const nlohmann::json& spec, const std::string& path) {
    return parse_weight<2>(spec, path);
}

WeightField3 weight3_from_json(const nlohmann::json& spec, const std::string& path) {
    return parse_weight<3>(spec, path);
}

nlohmann::json to_json(const WeightField2& w) {
    return {{"c0", w.c0},
            {"b", {w.b.x(), w.b.y()}},
            {"A", {w.A(0, 0), w.A(0, 1), w.A(1, 0), w.A(1, 1)}}};
}

}  // namespace fmcf
