#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

#include "fmcf/curve.hpp"

namespace fmcf {

/// Quadratic ambient weight f(x) = c0 + b.x + x^T A x / 2 on R^Dim.
///
/// Derivatives are exact: grad f = b + A x, Hess f = A, and the third
/// derivative vanishes identically. A is required to be exactly symmetric.
template <int Dim>
struct WeightField {
    using Vector = Eigen::Matrix<double, Dim, 1>;
    using Matrix = Eigen::Matrix<double, Dim, Dim>;

    double c0 = 0.0;
    Vector b = Vector::Zero();
    Matrix A = Matrix::Zero();

    static WeightField constant(double c0 = 0.0) {
        WeightField w;
        w.c0 = c0;
        return w;
    }

    /// f = c |x|^2 / 2.
    static WeightField isotropic(double c) {
        WeightField w;
        w.A = c * Matrix::Identity();
        return w;
    }

    double value(const Vector& x) const { return c0 + b.dot(x) + 0.5 * x.dot(A * x); }
    Vector grad(const Vector& x) const { return b + A * x; }
    const Matrix& hessian() const { return A; }

    bool is_constant() const { return b.isZero(0.0) && A.isZero(0.0); }

    /// True when A == c I and b == 0 for some c (returned through `c`).
    bool is_centered_isotropic(double* c = nullptr) const {
        if (!b.isZero(0.0)) return false;
        const double d = A(0, 0);
        if (!(A - d * Matrix::Identity()).isZero(0.0)) return false;
        if (c) *c = d;
        return true;
    }

    bool is_symmetric() const { return A == A.transpose(); }
};

using WeightField2 = WeightField<2>;
using WeightField3 = WeightField<3>;

template <int Dim>
double eval_f(const WeightField<Dim>& w, const typename WeightField<Dim>::Vector& x) {
    return w.value(x);
}

template <int Dim>
typename WeightField<Dim>::Vector grad_f(const WeightField<Dim>& w,
                                         const typename WeightField<Dim>::Vector& x) {
    return w.grad(x);
}

/// Restriction of the ambient Hessian to an orthonormal tangent frame:
/// entry (a, b) = t_a^T A t_b. Throws FrameError unless the frame is
/// orthonormal to 1e-12.
template <int Dim>
Eigen::MatrixXd tangential_hessian(const WeightField<Dim>& w,
                                   std::span<const typename WeightField<Dim>::Vector> frame);

/// Extrema of the tangential Hessian eigenvalues over a sampled surface.
struct HessianBounds {
    double lambda = 0.0;  ///< max eigenvalue
    double mu = 0.0;      ///< min eigenvalue
};

/// Ambient weight as seen by the curve code: either an exact quadratic, or an
/// exploratory callable with central finite-difference derivatives. Anything
/// computed with the exploratory kind must be flagged `third_derivative`.
class Weight {
public:
    using Function = std::function<double(const Vec2&)>;

    Weight() = default;
    Weight(WeightField2 quadratic) : impl_(std::move(quadratic)) {}  // NOLINT: implicit by intent

    static Weight exploratory(Function f, double fd_step = 1e-4, std::string label = "exploratory");

    double value(const Vec2& x) const;
    Vec2 grad(const Vec2& x) const;
    Mat2 hessian(const Vec2& x) const;

    /// Quadratic weights satisfy the third-derivative hypothesis exactly.
    bool third_derivative_zero() const { return std::holds_alternative<WeightField2>(impl_); }

    /// The quadratic field, or nullptr for exploratory weights.
    const WeightField2* quadratic() const { return std::get_if<WeightField2>(&impl_); }

    std::string describe() const;

private:
    struct Exploratory {
        Function f;
        double step;
        std::string label;
    };
    std::variant<WeightField2, Exploratory> impl_ = WeightField2{};
};

/// lambda = max over nodes of T^T Hess f T, mu = min of the same, with T the
/// unit tangent by central differences. For curves the tangent space is
/// one-dimensional, so both extrema come from the same scalar.
HessianBounds hessian_bounds(const Weight& w, const DiscreteCurve& curve);

/// Reads `{"c0":..,"b":[..],"A":[..row-major..]}`. `A` may also be given as an
/// array of rows. Symmetry is checked with exact equality.
WeightField2 weight_from_json(const nlohmann::json& spec, const std::string& path = "weight");
WeightField3 weight3_from_json(const nlohmann::json& spec, const std::string& path = "weight");

nlohmann::json to_json(const WeightField2& w);

}  // namespace fmcf
