#pragma once

#include <span>
#include <vector>

#include "fmcf/curve.hpp"
#include "fmcf/weights.hpp"

namespace fmcf {

/// Per-node geometry of a closed plane curve.
///
/// The curve is parametrized by a uniform node parameter theta with step
/// 2 pi / N. With edges e+ = X_{i+1} - X_i and e- = X_i - X_{i-1}:
///
///   tangent  = (X_{i+1} - X_{i-1}) / |..|
///   normal   = tangent rotated by -90 degrees, flipped for clockwise curves
///   metric_g = |e+| |e-| / dtheta^2           (second-order |dF/dtheta|^2)
///   sff_h    = -<N, (X_{i+1} - 2 X_i + X_{i-1}) / dtheta^2>
///   H        = sff_h / metric_g
///
/// The product metric makes H exact on uniformly sampled circles.
struct GeometryStack {
    double param_step = 0.0;  ///< dtheta
    int orientation = 1;      ///< +1 counter-clockwise, -1 clockwise

    std::vector<Vec2> tangent;
    std::vector<Vec2> normal;
    std::vector<double> metric_g;
    std::vector<double> sff_h;
    std::vector<double> H;
    std::vector<double> H_f;
    std::vector<double> dH_f_ds;
    std::vector<double> lap_H_f;
    std::vector<double> L_H_f;
    std::vector<double> hess_f_nn;  ///< Hess f (N, N)
    std::vector<double> dt_H_f_rhs;  ///< L H_f + (|h|^2 + Hess f(N,N)) H_f

    std::size_t size() const noexcept { return H.size(); }
};

/// Computes every GeometryStack field. Validates the mesh first.
GeometryStack build_geometry(const DiscreteCurve& curve, const Weight& w);

/// Unit tangents by central differences; shared by the weight bounds.
std::vector<Vec2> central_tangents(const DiscreteCurve& curve);

/// d/ds with the non-uniform 3-point stencil on chord lengths.
std::vector<double> arclength_derivative(const DiscreteCurve& curve, std::span<const double> field);

/// d^2/ds^2 with the non-uniform 3-point stencil on chord lengths.
std::vector<double> arclength_laplacian(const DiscreteCurve& curve, std::span<const double> field);

/// L phi = Delta_s phi - <grad f, T> d_s phi.
std::vector<double> weighted_laplacian(const DiscreteCurve& curve, std::span<const double> field,
                                       const Weight& w);

/// Periodic central first difference in the node parameter.
std::vector<double> param_derivative(std::span<const double> field, double step);

/// Periodic central second difference in the node parameter.
std::vector<double> param_second_derivative(std::span<const double> field, double step);

}  // namespace fmcf
