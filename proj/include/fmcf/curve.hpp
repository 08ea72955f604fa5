#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fmcf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr std::size_t kMinNodes = 16;
inline constexpr double kMinSpacingRatio = 0.05;

/// Closed polygon sampling a plane curve. Node i+N is node i. `node_ids`
/// label material points and survive time stepping unchanged.
struct DiscreteCurve {
    std::vector<Vec2> nodes;
    double time = 0.0;
    std::vector<int> node_ids;

    std::size_t size() const noexcept { return nodes.size(); }

    std::size_t next(std::size_t i) const noexcept { return i + 1 == nodes.size() ? 0 : i + 1; }
    std::size_t prev(std::size_t i) const noexcept { return i == 0 ? nodes.size() - 1 : i - 1; }

    /// Length of edge (i, i+1).
    double edge_length(std::size_t i) const { return (nodes[next(i)] - nodes[i]).norm(); }

    /// Position of the node carrying `id`, or npos.
    std::size_t index_of(int id) const;

    /// Throws DegenerateMeshError when N < 16, an edge has zero length, or
    /// min/max edge length drops below 0.05.
    void validate() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Builds a curve from raw points; ids are 0..N-1. Validates.
DiscreteCurve curve_from_points(std::vector<Vec2> points, double time = 0.0);

/// Circle of radius r, counter-clockwise, node 0 at angle 0.
DiscreteCurve make_circle(double radius, std::size_t n, const Vec2& center = Vec2::Zero());

/// Ellipse (a cos s, b sin s) sampled uniformly in s.
DiscreteCurve make_ellipse(double a, double b, std::size_t n, const Vec2& center = Vec2::Zero());

/// Smooth strictly convex "rounded square" with support function
/// p(phi) = scale * (1 + eps cos 4phi), sampled uniformly in the normal angle.
/// Requires |eps| < 1/15.
DiscreteCurve make_rounded_square(double scale, double eps, std::size_t n);

/// Non-convex test curve r(s) = radius * (1 + dent * cos 2s) in polar form.
DiscreteCurve make_bean(double radius, double dent, std::size_t n);

/// Shoelace area; positive for counter-clockwise curves.
double signed_area(const DiscreteCurve& curve);

/// Centroid of the node set.
Vec2 node_centroid(const DiscreteCurve& curve);

/// Mean distance of nodes to their centroid.
double mean_radius(const DiscreteCurve& curve);

double min_edge_length(const DiscreteCurve& curve);
double max_edge_length(const DiscreteCurve& curve);
double total_length(const DiscreteCurve& curve);

/// Polyline length of the shorter arc between nodes i and j.
double intrinsic_distance(const DiscreteCurve& curve, std::size_t i, std::size_t j);

/// Resamples the polygon to uniform chord-arclength spacing using periodic
/// Catmull-Rom interpolation. Node ids and node 0 are kept.
DiscreteCurve redistribute_uniform(const DiscreteCurve& curve);

/// Parses `{"kind":"circle"|"ellipse"|"rounded_square"|"bean"|"nodes", ...}`.
/// Throws ConfigError with the offending field path relative to `path`.
DiscreteCurve curve_from_json(const nlohmann::json& spec, const std::string& path = "curve");

}  // namespace fmcf
