// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fmcf/curve.hpp"
#include "fmcf/flow.hpp"
#include "fmcf/harnack.hpp"
#include "fmcf/oracles.hpp"
#include "fmcf/scenario.hpp"

using namespace fmcf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

FlowConfig cfg_auto(double t_end, int record_every = 1) {
    FlowConfig c;
    c.t_end = t_end;
    c.record_every = record_every;
    return c;
}

FlowConfig cfg_fixed(double dt, double t_end, int record_every = 1) {
    FlowConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.record_every = record_every;
    return c;
}

WeightField2 diag(double a, double b) {
    WeightField2 w;
    w.A = Vec2(a, b).asDiagonal();
    return w;
}

// 1
Outcome shrinking_circle_oracle() {
    const auto trace = run(make_circle(2.0, 256), WeightField2::constant(), cfg_auto(1.5));
    double err = 0.0;
    for (const auto& s : trace.snapshots) {
        const double r = radial_solution(1, 2.0, 0.0, s.curve.time);
        for (const auto& p : s.curve.nodes) err = std::max(err, std::abs(p.norm() - r) / r);
    }
    const bool done = trace.t_end() == 1.5;
    return {done && err <= 1e-4, "max rel err " + fmt(err) + " over " + std::to_string(trace.steps) + " steps"};
}

// 2
Outcome f_minimal_circle() {
    const auto c0 = make_circle(1.0, 256);
    const Weight w = WeightField2::isotropic(1.0);
    auto c = c0;
    FlowConfig cfg;
    for (int k = 0; k < 1000; ++k) c = step(c, w, cfg);
    double disp = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) disp = std::max(disp, (c.nodes[i] - c0.nodes[i]).norm());
    return {disp <= 1e-8, "max displacement " + fmt(disp) + " after 1000 steps to t = " + fmt(c.time)};
}

// 3
Outcome evolution_residual_ratios() {
    const Weight w = WeightField2::isotropic(0.1);
    const double dt0 = 2e-4;
    const auto coarse = max_residuals(evolution_residuals(run(make_ellipse(2.0, 1.0, 128), w, cfg_fixed(dt0, 0.02)), w));
    const auto fine = max_residuals(evolution_residuals(run(make_ellipse(2.0, 1.0, 256), w, cfg_fixed(dt0 / 2, 0.02)), w));
    const double r[4] = {coarse.metric / fine.metric, coarse.normal / fine.normal, coarse.H_f / fine.H_f,
                         coarse.sff / fine.sff};
    bool ok = true;
    for (double x : r) ok = ok && x >= 3.0 && x <= 5.0;
    return {ok, "ratios metric " + fmt(r[0]) + ", normal " + fmt(r[1]) + ", H_f " + fmt(r[2]) + ", sff " + fmt(r[3])};
}

struct SuiteCase {
    std::string label;
    DiscreteCurve curve;
    WeightField2 weight;
    FlowTrace trace;
    HarnackReport harnack;
    SignReport signs;
    PinchReport pinch;
};

std::vector<SuiteCase> convex_suite() {
    struct Shape {
        std::string name;
        DiscreteCurve curve;
    };
    const std::vector<Shape> shapes = {
        {"circle", make_circle(1.0, 128)},
        {"ellipse_2to1", make_ellipse(2.0, 1.0, 128)},
        {"ellipse_1.15to1", make_ellipse(1.15, 1.0, 128)},
        {"rounded_square_0.03", make_rounded_square(1.0, 0.03, 128)},
        {"rounded_square_0.003", make_rounded_square(1.0, 0.003, 128)},
    };
    const std::vector<std::pair<std::string, WeightField2>> weights = {
        {"A=0", WeightField2::constant()},
        {"A=0.3I", WeightField2::isotropic(0.3)},
        {"A=-0.3I", WeightField2::isotropic(-0.3)},
        {"A=diag(0.2,0)", diag(0.2, 0.0)},
    };
    std::vector<std::future<SuiteCase>> jobs;
    for (const auto& s : shapes) {
        for (const auto& [wn, w] : weights) {
            jobs.push_back(std::async(std::launch::async, [s, wn = wn, w = w] {
                SuiteCase c{s.name + " " + wn, s.curve, w, {}, {}, {}, {}};
                c.trace = run(c.curve, w, cfg_auto(0.3));
                c.harnack = verify_differential_harnack(c.trace, w, HarnackVariant::plain);
                c.signs = sign_monitors(c.trace);
                c.pinch = pinch_monitor(c.trace, w);
                return c;
            }));
        }
    }
    std::vector<SuiteCase> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

// 4
Outcome differential_harnack(const std::vector<SuiteCase>& suite) {
    std::size_t active = 0, failed = 0;
    std::vector<std::string> families;
    std::string worst;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& c : suite) {
        if (c.harnack.vacuous) continue;
        ++active;
        const double margin = c.harnack.global_min + c.harnack.tol;
        if (!c.harnack.violations.empty() || margin < 0.0) ++failed;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst = c.label;
        }
        const std::string fam = c.label.substr(0, c.label.find(' '));
        if (std::find(families.begin(), families.end(), fam) == families.end()) families.push_back(fam);
    }
    std::string fams;
    for (const auto& f : families) fams += (fams.empty() ? "" : ",") + f;
    return {active > 0 && failed == 0,
            std::to_string(active) + "/" + std::to_string(suite.size()) + " cases non-vacuous [" + fams +
                "], violations in " + std::to_string(failed) + ", tightest " + worst + " (min + tol = " +
                fmt(worst_margin) + ")"};
}

// 5
Outcome hamilton_variant() {
    const auto trace = run(make_circle(std::sqrt(2.0), 128), WeightField2::constant(), cfg_fixed(1e-3, 0.6, 10));
    const auto r = verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::hamilton_2t);
    double dev = 0.0;
    std::size_t n = 0;
    for (const auto& s : r.samples) {
        if (std::abs(s.t - 0.5) > 1e-12) continue;
        dev = std::max(dev, std::abs(s.value() - 2.0));
        ++n;
    }
    return {n == 128 && dev <= 2e-3, "max |z_min + H/(2t) - 2| at t = 0.5: " + fmt(dev) + " over " + std::to_string(n) + " nodes"};
}

// 6
Outcome sign_preservation(const std::vector<SuiteCase>& suite) {
    std::size_t hf_checked = 0, h_checked = 0, failed = 0;
    for (const auto& c : suite) {
        if (!c.signs.hf_vacuous) {
            ++hf_checked;
            if (!c.signs.hf_preserved) ++failed;
        }
        if (!c.signs.h_vacuous) {
            ++h_checked;
            if (!c.signs.h_preserved) ++failed;
        }
    }
    return {failed == 0 && h_checked == suite.size(),
            "H_f checked on " + std::to_string(hf_checked) + ", h on " + std::to_string(h_checked) + " of " +
                std::to_string(suite.size()) + " traces, failures " + std::to_string(failed)};
}

// 7
Outcome pinch_bound(const std::vector<SuiteCase>& suite) {
    std::vector<std::pair<std::string, PinchReport>> reports;
    for (const auto& c : suite) reports.emplace_back(c.label, c.pinch);
    const double s = 0.895706;
    struct Extra {
        std::string label;
        DiscreteCurve curve;
        WeightField2 w;
        double t_end;
    };
    const std::vector<Extra> extras = {
        {"circle R=0.8 A=I", make_circle(0.8, 128), WeightField2::isotropic(1.0), 0.3},
        {"ellipse inf H_f=0.1 A=0.2I", make_ellipse(2 * s, s, 128), WeightField2::isotropic(0.2), 0.3},
        {"ellipse 0.77x0.7 A=I", make_ellipse(0.77, 0.7, 128), WeightField2::isotropic(1.0), 0.2},
    };
    for (const auto& e : extras) {
        const auto trace = run(e.curve, e.w, cfg_auto(e.t_end, 10));
        reports.emplace_back(e.label, pinch_monitor(trace, e.w));
    }
    std::size_t met = 0, failed = 0;
    double worst = 0.0;
    for (const auto& [label, r] : reports) {
        if (!r.hypotheses_met) continue;
        ++met;
        worst = std::max(worst, r.sup_ratio / r.C_squared);
        if (!(r.sup_ratio <= r.C_squared * 1.05)) ++failed;
    }
    return {met >= 3 && failed == 0, std::to_string(met) + " hypotheses-met scenarios, max sup_ratio / C^2 = " +
                                         fmt(worst) + ", failures " + std::to_string(failed)};
}

// 8
Outcome integral_harnack() {
    const Weight w = WeightField2::isotropic(1.0);
    const auto trace = run(make_ellipse(0.77, 0.7, 128), w, cfg_auto(0.2));
    const auto pinch = pinch_monitor(trace, w);
    const auto diff = verify_differential_harnack(trace, w, HarnackVariant::plain);
    const bool met = pinch.hypotheses_met && !diff.vacuous;
    const auto pairs = sample_integral_pairs(trace, 32, 7);
    const auto checks = verify_integral_harnack(trace, w, pairs, std::sqrt(pinch.C_squared), met);
    std::size_t active = 0, failed = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
        if (c.vacuous) continue;
        ++active;
        min_margin = std::min(min_margin, c.margin + c.tol);
        if (!c.passed) ++failed;
    }

    const auto circle = run(make_circle(1.0, 128), WeightField2::constant(), cfg_auto(0.4, 10));
    std::vector<IntegralPair> same;
    for (std::size_t k = 1; k + 1 < circle.snapshots.size(); k += 3) {
        same.push_back({static_cast<int>(k % 128), circle.snapshots[k].curve.time, static_cast<int>(k % 128),
                        circle.snapshots[k + 1].curve.time});
    }
    const auto sc = verify_integral_harnack(circle, WeightField2::constant(), same, 1.0, true);
    double min_same = std::numeric_limits<double>::infinity();
    for (const auto& c : sc) min_same = std::min(min_same, c.margin);

    return {met && active >= 20 && failed == 0 && min_same > 0.0,
            std::to_string(active) + " non-vacuous pairs, min(margin + tol) = " + fmt(min_margin) + ", failures " +
                std::to_string(failed) + "; circle same-node min margin " + fmt(min_same) + " over " +
                std::to_string(sc.size()) + " pairs"};
}

// Nested grid refinement: a 2001-point scan, then repeated 2001-point scans
// on the two cells around the best point.
double brute_force_min(double d, double g, double h) {
    double lo = -10.0 * (1.0 + std::abs(g) / h), hi = -lo;
    double best = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 6; ++level) {
        double best_v = lo;
        const double step = (hi - lo) / (kScanPoints - 1);
        for (int k = 0; k < kScanPoints; ++k) {
            const double v = lo + step * k;
            const double z = harnack_quantity(d, g, h, v);
            if (z < best) {
                best = z;
                best_v = v;
            }
        }
        lo = best_v - step;
        hi = best_v + step;
    }
    return best;
}

// 9
Outcome minimizer_equivalence() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> lh(-3.0, 1.0);
    double worst = 0.0;
    std::size_t bad = 0;
    for (int k = 0; k < 10000; ++k) {
        const double d = u(rng), g = u(rng), h = std::pow(10.0, lh(rng));
        const double a = harnack_min(d, g, h).z_min;
        const double b = brute_force_min(d, g, h);
        const double rel = std::abs(a - b) / (1.0 + std::abs(a));
        worst = std::max(worst, rel);
        if (rel > 1e-6) ++bad;
    }
    return {bad == 0, "10000 triples, max |analytic - scan| / (1 + |z|) = " + fmt(worst)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

// 10
Outcome determinism_and_vacuity() {
    const auto root = fs::temp_directory_path() / "fmcf_acceptance";
    fs::remove_all(root);
    const auto files = bundled_scenarios();
    std::size_t same = 0;
    bool vacuous_ok = false;
    std::vector<std::future<std::pair<bool, bool>>> jobs;
    for (const auto& f : files) {
        jobs.push_back(std::async(std::launch::async, [f, root] {
            const auto sc = load_scenario(f);
            RunOptions a;
            a.out_root = root / "a";
            RunOptions b;
            b.out_root = root / "b";
            const auto ra = run_scenario(sc, a);
            const auto rb = run_scenario(sc, b);
            const bool identical = slurp(ra.out_dir / "summary.json") == slurp(rb.out_dir / "summary.json") &&
                                   !slurp(ra.out_dir / "summary.json").empty();
            bool vac = false;
            if (sc.name == "expanding_sphere_vacuous") {
                vac = ra.exit_code == 0;
                bool seen = false;
                for (const auto& c : ra.summary.at("checks")) {
                    if (c.at("type") == "differential_harnack") {
                        seen = true;
                        vac = vac && c.at("vacuous").get<bool>() && c.at("passed").get<bool>();
                    }
                }
                vac = vac && seen;
            }
            return std::make_pair(identical, vac);
        }));
    }
    for (auto& j : jobs) {
        const auto [identical, vac] = j.get();
        same += identical;
        vacuous_ok = vacuous_ok || vac;
    }
    return {files.size() >= 6 && same == files.size() && vacuous_ok,
            std::to_string(same) + "/" + std::to_string(files.size()) +
                " scenarios byte-identical; expanding sphere vacuous: " + (vacuous_ok ? "yes" : "no")};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "shrinking-circle oracle", shrinking_circle_oracle);
    report(2, "f-minimal circle", f_minimal_circle);
    report(3, "evolution-equation residuals", evolution_residual_ratios);

    std::vector<SuiteCase> suite;
    const auto t0 = std::chrono::steady_clock::now();
    std::string suite_error;
    try {
        suite = convex_suite();
    } catch (const std::exception& e) {
        suite_error = e.what();
    }
    const double suite_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("     convex suite: %zu traces (%.1fs)%s\n", suite.size(), suite_secs,
                suite_error.empty() ? "" : (" error: " + suite_error).c_str());
    auto with_suite = [&](Outcome (*f)(const std::vector<SuiteCase>&)) {
        return [&suite, &suite_error, f]() -> Outcome {
            if (!suite_error.empty()) return {false, "suite failed: " + suite_error};
            return f(suite);
        };
    };

    report(4, "differential Harnack", with_suite(differential_harnack));
    report(5, "Hamilton 2t variant", hamilton_variant);
    report(6, "sign preservation", with_suite(sign_preservation));
    report(7, "pinch bound", with_suite(pinch_bound));
    report(8, "integral Harnack", integral_harnack);
    report(9, "minimizer equivalence", minimizer_equivalence);
    report(10, "determinism and vacuity", determinism_and_vacuity);
    return failures == 0 ? 0 : 1;
}
