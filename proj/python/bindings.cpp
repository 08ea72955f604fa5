#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmcf/curve.hpp"
#include "fmcf/errors.hpp"
#include "fmcf/flow.hpp"
#include "fmcf/geometry.hpp"
#include "fmcf/harnack.hpp"
#include "fmcf/oracles.hpp"
#include "fmcf/scenario.hpp"

namespace py = pybind11;
using namespace fmcf;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

DiscreteCurve to_curve(const Points& pts, double time) {
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) nodes.emplace_back(pts(i, 0), pts(i, 1));
    return curve_from_points(std::move(nodes), time);
}

Points to_points(const DiscreteCurve& c) {
    Points p(static_cast<Eigen::Index>(c.size()), 2);
    for (std::size_t i = 0; i < c.size(); ++i) p.row(static_cast<Eigen::Index>(i)) = c.nodes[i].transpose();
    return p;
}

WeightField2 make_weight(const Mat2& A, const Vec2& b, double c0) {
    WeightField2 w;
    w.A = A;
    w.b = b;
    w.c0 = c0;
    if (!w.is_symmetric()) throw ConfigError("weight.A", "must be symmetric");
    return w;
}

py::dict geometry_dict(const GeometryStack& g) {
    py::dict d;
    d["g"] = g.metric_g;
    d["h"] = g.sff_h;
    d["H"] = g.H;
    d["H_f"] = g.H_f;
    d["dH_f_ds"] = g.dH_f_ds;
    d["L_H_f"] = g.L_H_f;
    d["dt_H_f_rhs"] = g.dt_H_f_rhs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "f-mean curvature flow core";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<DegenerateMeshError> mesh_error(m, "DegenerateMeshError", PyExc_ValueError);
    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
    static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const DegenerateMeshError& e) {
            py::set_error(mesh_error, e.what());
        } catch (const DomainError& e) {
            py::set_error(domain_error, e.what());
        } catch (const InputError& e) {
            py::set_error(input_error, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("circle", [](double r, std::size_t n) { return to_points(make_circle(r, n)); }, py::arg("radius"),
          py::arg("n"));
    m.def("ellipse", [](double a, double b, std::size_t n) { return to_points(make_ellipse(a, b, n)); },
          py::arg("a"), py::arg("b"), py::arg("n"));

    m.def(
        "geometry",
        [](const Points& pts, const Mat2& A, const Vec2& b, double c0) {
            return geometry_dict(build_geometry(to_curve(pts, 0.0), make_weight(A, b, c0)));
        },
        py::arg("points"), py::arg("A") = Mat2::Zero().eval(), py::arg("b") = Vec2::Zero().eval(),
        py::arg("c0") = 0.0, "Per-node metric, second fundamental form, H, H_f and derivatives.");

    m.def(
        "simulate",
        [](const Points& pts, double t_end, const Mat2& A, const Vec2& b, double c0, std::optional<double> dt,
           const std::string& scheme, int record_every) {
            FlowConfig cfg;
            cfg.t_end = t_end;
            cfg.dt = dt;
            cfg.record_every = record_every;
            if (scheme == "rk4") cfg.scheme = Scheme::rk4;
            else if (scheme == "explicit_euler") cfg.scheme = Scheme::explicit_euler;
            else throw ConfigError("flow.scheme", "expected \"rk4\" or \"explicit_euler\"");
            const auto curve = to_curve(pts, 0.0);
            cfg.validate(curve.time);
            const auto trace = run(curve, make_weight(A, b, c0), cfg);
            py::list times, nodes;
            for (const auto& s : trace.snapshots) {
                times.append(s.curve.time);
                nodes.append(to_points(s.curve));
            }
            py::dict d;
            d["t"] = times;
            d["nodes"] = nodes;
            d["steps"] = trace.steps;
            d["stop_reason"] = trace.stop_reason;
            return d;
        },
        py::arg("points"), py::arg("t_end"), py::arg("A") = Mat2::Zero().eval(), py::arg("b") = Vec2::Zero().eval(),
        py::arg("c0") = 0.0, py::arg("dt") = py::none(), py::arg("scheme") = "rk4", py::arg("record_every") = 1);

    m.def("radial_solution", &radial_solution, py::arg("n"), py::arg("R0"), py::arg("c"), py::arg("t"));
    m.def("radial_harnack", &radial_harnack, py::arg("n"), py::arg("R0"), py::arg("c"), py::arg("t"));

    m.def(
        "harnack_min",
        [](double dt_H_f, double grad_H_f, double h) {
            const auto s = harnack_min(dt_H_f, grad_H_f, h);
            return py::make_tuple(s.z_min, s.v_star);
        },
        py::arg("dt_H_f"), py::arg("grad_H_f"), py::arg("h"), "Returns (z_min, v_star).");

    m.def(
        "run_scenario_json",
        [](const std::string& spec, const std::string& out_root, double tol_scale, bool run_checks,
           bool write_files) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(spec);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError("config", e.what());
            }
            const auto sc = parse_scenario(j);
            RunOptions opt;
            opt.out_root = out_root;
            opt.tol_scale = tol_scale;
            opt.run_checks = run_checks;
            opt.write_files = write_files;
            ScenarioResult res;
            {
                py::gil_scoped_release release;
                res = run_scenario(sc, opt);
            }
            return py::make_tuple(res.exit_code, dump_summary(res.summary), res.out_dir.string());
        },
        py::arg("spec"), py::arg("out_root"), py::arg("tol_scale") = 1.0, py::arg("run_checks") = true,
        py::arg("write_files") = true);

    m.def("describe", &describe_check, py::arg("check"));
    m.def("check_names", &check_names);
    m.def("bundled_scenarios", [] {
        std::vector<std::string> out;
        for (const auto& p : bundled_scenarios()) out.push_back(p.string());
        return out;
    });
}
