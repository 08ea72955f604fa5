#include "fmcf/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fmcf/errors.hpp"
#include "json_util.hpp"

namespace fmcf {

using std::numbers::pi;

std::size_t DiscreteCurve::index_of(int id) const {
    // Ids are usually the identity permutation.
    if (id >= 0 && static_cast<std::size_t>(id) < node_ids.size() && node_ids[id] == id) {
        return static_cast<std::size_t>(id);
    }
    auto it = std::find(node_ids.begin(), node_ids.end(), id);
    return it == node_ids.end() ? npos : static_cast<std::size_t>(it - node_ids.begin());
}

void DiscreteCurve::validate() const {
    const std::size_t n = nodes.size();
    if (n < kMinNodes) {
        throw DegenerateMeshError("curve has " + std::to_string(n) + " nodes, need at least " +
                                      std::to_string(kMinNodes),
                                  0);
    }
    if (node_ids.size() != n) throw DegenerateMeshError("node_ids length differs from nodes", 0);

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t lo_at = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double len = edge_length(i);
        if (!std::isfinite(len)) throw DegenerateMeshError("non-finite node coordinates", i);
        if (len < lo) {
            lo = len;
            lo_at = i;
        }
        hi = std::max(hi, len);
    }
    if (!(lo > 0.0)) throw DegenerateMeshError("zero-length edge", lo_at);
    if (lo / hi < kMinSpacingRatio) {
        throw DegenerateMeshError("edge spacing ratio " + std::to_string(lo / hi) + " below " +
                                      std::to_string(kMinSpacingRatio),
                                  lo_at);
    }
}

DiscreteCurve curve_from_points(std::vector<Vec2> points, double time) {
    DiscreteCurve c;
    c.nodes = std::move(points);
    c.time = time;
    c.node_ids.resize(c.nodes.size());
    std::iota(c.node_ids.begin(), c.node_ids.end(), 0);
    c.validate();
    return c;
}

DiscreteCurve make_circle(double radius, std::size_t n, const Vec2& center) {
    if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = center + radius * Vec2(std::cos(s), std::sin(s));
    }
    return curve_from_points(std::move(pts));
}

DiscreteCurve make_ellipse(double a, double b, std::size_t n, const Vec2& center) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("a", "semi-axes must be positive");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = center + Vec2(a * std::cos(s), b * std::sin(s));
    }
    return curve_from_points(std::move(pts));
}

DiscreteCurve make_rounded_square(double scale, double eps, std::size_t n) {
    if (!(scale > 0.0)) throw ConfigError("scale", "must be positive");
    if (!(std::abs(eps) < 1.0 / 15.0)) throw ConfigError("eps", "|eps| must be below 1/15");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        const double p = scale * (1.0 + eps * std::cos(4.0 * phi));
        const double dp = -4.0 * scale * eps * std::sin(4.0 * phi);
        const Vec2 normal(std::cos(phi), std::sin(phi));
        const Vec2 tangent(-std::sin(phi), std::cos(phi));
        pts[i] = p * normal + dp * tangent;
    }
    return curve_from_points(std::move(pts));
}

DiscreteCurve make_bean(double radius, double dent, std::size_t n) {
    if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
    if (!(dent >= 0.0 && dent < 1.0)) throw ConfigError("dent", "must lie in [0, 1)");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        const double r = radius * (1.0 + dent * std::cos(2.0 * s));
        pts[i] = r * Vec2(std::cos(s), std::sin(s));
    }
    return curve_from_points(std::move(pts));
}

double signed_area(const DiscreteCurve& curve) {
    double twice = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec2& p = curve.nodes[i];
        const Vec2& q = curve.nodes[curve.next(i)];
        twice += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * twice;
}

Vec2 node_centroid(const DiscreteCurve& curve) {
    Vec2 sum = Vec2::Zero();
    for (const auto& p : curve.nodes) sum += p;
    return sum / static_cast<double>(curve.size());
}

double mean_radius(const DiscreteCurve& curve) {
    const Vec2 c = node_centroid(curve);
    double sum = 0.0;
    for (const auto& p : curve.nodes) sum += (p - c).norm();
    return sum / static_cast<double>(curve.size());
}

double min_edge_length(const DiscreteCurve& curve) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i) lo = std::min(lo, curve.edge_length(i));
    return lo;
}

double max_edge_length(const DiscreteCurve& curve) {
    double hi = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) hi = std::max(hi, curve.edge_length(i));
    return hi;
}

double total_length(const DiscreteCurve& curve) {
    double sum = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) sum += curve.edge_length(i);
    return sum;
}

double intrinsic_distance(const DiscreteCurve& curve, std::size_t i, std::size_t j) {
    const std::size_t n = curve.size();
    if (i >= n || j >= n) throw InputError("intrinsic_distance: node index out of range");
    if (i == j) return 0.0;
    double forward = 0.0;
    for (std::size_t k = i; k != j; k = curve.next(k)) forward += curve.edge_length(k);
    return std::min(forward, total_length(curve) - forward);
}

DiscreteCurve redistribute_uniform(const DiscreteCurve& curve) {
    const std::size_t n = curve.size();
    std::vector<double> s(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) s[i + 1] = s[i] + curve.edge_length(i);
    const double length = s[n];

    auto arc = [&](std::size_t i, long shift) {
        // arclength of node i + shift, unwrapped across the seam
        long k = static_cast<long>(i) + shift;
        double offset = 0.0;
        while (k < 0) {
            k += static_cast<long>(n);
            offset -= length;
        }
        while (k >= static_cast<long>(n)) {
            k -= static_cast<long>(n);
            offset += length;
        }
        return s[static_cast<std::size_t>(k)] + offset;
    };
    auto slope = [&](std::size_t i) {
        const Vec2 d = curve.nodes[curve.next(i)] - curve.nodes[curve.prev(i)];
        return Vec2(d / (arc(i, 1) - arc(i, -1)));
    };

    DiscreteCurve out = curve;
    std::size_t seg = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const double target = length * static_cast<double>(k) / static_cast<double>(n);
        while (s[seg + 1] < target) ++seg;
        const std::size_t j = curve.next(seg);
        const double h = s[seg + 1] - s[seg];
        const double u = (target - s[seg]) / h;
        const double u2 = u * u;
        const double u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1;
        const double h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2;
        const double h11 = u3 - u2;
        out.nodes[k] = h00 * curve.nodes[seg] + h10 * h * slope(seg) + h01 * curve.nodes[j] +
                       h11 * h * slope(j);
    }
    return out;
}

namespace {

std::size_t node_count(const nlohmann::json& spec, const std::string& path) {
    const long long n = detail::get_integer(spec, "n", path);
    if (n < static_cast<long long>(kMinNodes)) {
        throw ConfigError(detail::join(path, "n"), "need at least " + std::to_string(kMinNodes) + " nodes");
    }
    return static_cast<std::size_t>(n);
}

Vec2 read_point(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [x, y]");
    return {detail::as_number(v[0], path + "[0]"), detail::as_number(v[1], path + "[1]")};
}

template <class F>
DiscreteCurve guarded(const std::string& path, F&& make) {
    try {
        return make();
    } catch (const ConfigError& e) {
        throw ConfigError(detail::join(path, e.field()), e.what());
    } catch (const DegenerateMeshError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

DiscreteCurve curve_from_json(const nlohmann::json& spec, const std::string& path) {
    const std::string kind = detail::get_string(spec, "kind", path);
    DiscreteCurve c;
    if (kind == "circle") {
        const double r = detail::get_number(spec, "radius", path);
        const std::size_t n = node_count(spec, path);
        Vec2 center = Vec2::Zero();
        if (spec.contains("center")) center = read_point(spec.at("center"), detail::join(path, "center"));
        c = guarded(path, [&] { return make_circle(r, n, center); });
    } else if (kind == "ellipse") {
        const double a = detail::get_number(spec, "a", path);
        const double b = detail::get_number(spec, "b", path);
        const std::size_t n = node_count(spec, path);
        Vec2 center = Vec2::Zero();
        if (spec.contains("center")) center = read_point(spec.at("center"), detail::join(path, "center"));
        c = guarded(path, [&] { return make_ellipse(a, b, n, center); });
    } else if (kind == "rounded_square") {
        const double scale = detail::get_number(spec, "scale", path);
        const double eps = detail::get_number_or(spec, "eps", 0.05, path);
        const std::size_t n = node_count(spec, path);
        c = guarded(path, [&] { return make_rounded_square(scale, eps, n); });
    } else if (kind == "bean") {
        const double r = detail::get_number(spec, "radius", path);
        const double dent = detail::get_number_or(spec, "dent", 0.3, path);
        const std::size_t n = node_count(spec, path);
        c = guarded(path, [&] { return make_bean(r, dent, n); });
    } else if (kind == "nodes") {
        const auto& pts = detail::require(spec, "points", path);
        const std::string ppath = detail::join(path, "points");
        if (!pts.is_array()) throw ConfigError(ppath, "expected an array of [x, y]");
        std::vector<Vec2> nodes;
        nodes.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            nodes.push_back(read_point(pts[i], ppath + "[" + std::to_string(i) + "]"));
        }
        c = guarded(path, [&] { return curve_from_points(std::move(nodes)); });
    } else {
        throw ConfigError(detail::join(path, "kind"), "unknown curve kind '" + kind + "'");
    }
    c.time = detail::get_number_or(spec, "time", 0.0, path);
    if (c.time < 0.0) throw ConfigError(detail::join(path, "time"), "must be nonnegative");
    return c;
}

}  // namespace fmcf
