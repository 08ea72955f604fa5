// fmcf: scenario runner and oracle tables.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fmcf/curve.hpp"
#include "fmcf/errors.hpp"
#include "fmcf/flow.hpp"
#include "fmcf/format.hpp"
#include "fmcf/oracles.hpp"
#include "fmcf/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Outcome {
    std::string name;
    int code = kExitPass;
};

fs::path default_out_root() {
    if (const char* env = std::getenv("FMCF_OUT"); env && *env) return env;
    return "fmcf_out";
}

std::vector<fs::path> resolve_configs(const std::vector<std::string>& given) {
    std::vector<fs::path> out;
    if (given.empty()) return fmcf::bundled_scenarios();
    for (const auto& g : given) {
        fs::path p(g);
        // bare names resolve against the bundled directory
        if (!fs::exists(p)) {
            fs::path b = fmcf::scenario_dir() / p;
            if (b.extension() != ".json") b += ".json";
            if (fs::exists(b)) p = b;
        }
        out.push_back(p);
    }
    return out;
}

std::string check_line(const nlohmann::json& c) {
    std::string s = "  " + c.at("type").get<std::string>();
    if (c.contains("variant")) s += "(" + c.at("variant").get<std::string>() + ")";
    if (c.at("vacuous").get<bool>()) {
        s += ": vacuous";
    } else {
        s += c.at("passed").get<bool>() ? ": pass" : ": FAIL";
    }
    if (c.contains("global_min")) s += " global_min=" + fmcf::format_double(c.at("global_min").get<double>());
    if (c.contains("max_rel_error")) s += " max_rel_error=" + fmcf::format_double(c.at("max_rel_error").get<double>());
    if (c.contains("min_margin") && c.at("min_margin").is_number())
        s += " min_margin=" + fmcf::format_double(c.at("min_margin").get<double>());
    return s;
}

int run_many(const std::vector<std::string>& configs, const fmcf::RunOptions& opt, int jobs) {
    const auto paths = resolve_configs(configs);
    if (paths.empty()) {
        std::cerr << "fmcf: no scenarios found\n";
        return kExitUsage;
    }

    // parse everything first so usage errors never leave partial output
    std::vector<fmcf::Scenario> scenarios;
    for (const auto& p : paths) {
        try {
            scenarios.push_back(fmcf::load_scenario(p));
        } catch (const fmcf::ConfigError& e) {
            std::cerr << "fmcf: " << p.string() << ": config error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const fmcf::Error& e) {
            std::cerr << "fmcf: " << p.string() << ": " << e.what() << "\n";
            return kExitUsage;
        }
    }

    std::vector<Outcome> outcomes(scenarios.size());
    std::vector<std::string> reports(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            const auto& sc = scenarios[i];
            Outcome o{sc.name};
            std::string report;
            try {
                const auto res = fmcf::run_scenario(sc, opt);
                o.code = res.exit_code;
                report = sc.name + (res.exit_code == 0 ? ": pass" : ": FAIL") + " (" + res.out_dir.string() + ")\n";
                for (const auto& c : res.summary.at("checks")) report += check_line(c) + "\n";
                if (res.summary.at("trace").contains("error"))
                    report += "  run error: " + res.summary.at("trace").at("error").get<std::string>() + "\n";
            } catch (const fmcf::ConfigError& e) {
                o.code = kExitUsage;
                report = sc.name + ": config error: " + std::string(e.what()) + "\n";
            } catch (const std::exception& e) {
                o.code = kExitFail;
                report = sc.name + ": error: " + e.what() + "\n";
            }
            outcomes[i] = o;
            reports[i] = report;
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(scenarios.size()));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kExitPass;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        std::cout << reports[i];
        if (outcomes[i].code == kExitUsage) code = kExitUsage;
        else if (outcomes[i].code != kExitPass && code != kExitUsage) code = kExitFail;
    }
    return code;
}

int oracle_table(int n, double R0, double c, double t_end, int samples) {
    const fmcf::RadialSolution sol{n, R0, c};
    sol.validate();
    if (samples < 2) throw fmcf::ConfigError("samples", "must be at least 2");
    if (!(t_end >= 0.0)) throw fmcf::ConfigError("t-end", "must be nonnegative");
    std::cout << "t,R,H_f,dt_H_f\n";
    for (int k = 0; k < samples; ++k) {
        const double t = t_end * k / (samples - 1);
        std::cout << fmcf::format_double(t) << ',' << fmcf::format_double(sol.radius(t)) << ','
                  << fmcf::format_double(sol.H_f(t)) << ',' << fmcf::format_double(sol.dt_H_f(t)) << '\n';
    }
    return kExitPass;
}

// Simulates a circle scenario and prints R_exact against the node-mean radius.
int oracle_compare(const std::string& config) {
    const auto paths = resolve_configs({config});
    const fmcf::Scenario sc = fmcf::load_scenario(paths.front());
    if (sc.curve_spec.value("kind", "") != "circle") throw fmcf::ConfigError("curve.kind", "oracle needs a circle");
    double c = 0.0;
    if (!sc.weight.is_centered_isotropic(&c)) throw fmcf::ConfigError("weight", "oracle needs f = c0 + c |x|^2 / 2");
    const fmcf::RadialSolution sol{1, sc.curve_spec.at("radius").get<double>(), c};
    const auto trace = fmcf::run(sc.curve, fmcf::Weight(sc.weight), sc.flow);
    std::vector<fmcf::OracleRow> rows;
    for (const auto& s : trace.snapshots) {
        const double exact = sol.radius(s.curve.time);
        const double sim = fmcf::mean_radius(s.curve);
        rows.push_back({s.curve.time, exact, sim, std::abs(sim - exact)});
    }
    std::cout << fmcf::oracle_table_csv(rows);
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"f-mean curvature flow simulator and Harnack verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fmcf 0.1.0");

    std::vector<std::string> configs;
    std::string out;
    int jobs = 1;
    double tol_scale = 1.0;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", configs, "Scenario file or bundled name (repeatable; default: all bundled)");
        sub->add_option("--out", out, "Output root (default: $FMCF_OUT, else ./fmcf_out)");
        sub->add_option("--jobs", jobs, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--tol-scale", tol_scale, "Multiplies all default tolerances")->check(CLI::PositiveNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "Run the flow and write the trace");
    add_run_flags(simulate);
    auto* verify = app.add_subcommand("verify", "Run a scenario's checks");
    add_run_flags(verify);

    auto* oracle = app.add_subcommand("oracle", "Radial solution table, or a circle scenario against it");
    int on = 1;
    double oR0 = 1.0, oc = 0.0, ot = 0.4;
    int osamples = 11;
    std::string oconfig;
    oracle->add_option("--n", on, "Dimension of the sphere")->check(CLI::PositiveNumber);
    oracle->add_option("--R0", oR0, "Initial radius");
    oracle->add_option("--c", oc, "Weight coefficient in f = c |x|^2 / 2");
    oracle->add_option("--t-end", ot, "Final time");
    oracle->add_option("--samples", osamples, "Rows in the table");
    oracle->add_option("--config", oconfig, "Circle scenario to compare against the closed form");

    auto* describe = app.add_subcommand("describe", "Statement and hypotheses behind a check");
    std::string check;
    describe->add_option("check", check, "Check name")->required();

    auto* list = app.add_subcommand("list", "Bundled scenarios and check names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        fmcf::RunOptions opt;
        opt.out_root = out.empty() ? default_out_root() : fs::path(out);
        opt.tol_scale = tol_scale;
        if (*simulate) {
            opt.run_checks = false;
            return run_many(configs, opt, jobs);
        }
        if (*verify) return run_many(configs, opt, jobs);
        if (*oracle) return oconfig.empty() ? oracle_table(on, oR0, oc, ot, osamples) : oracle_compare(oconfig);
        if (*describe) {
            std::cout << fmcf::describe_check(check);
            return kExitPass;
        }
        if (*list) {
            std::cout << "scenarios (" << fmcf::scenario_dir().string() << "):\n";
            for (const auto& p : fmcf::bundled_scenarios()) {
                std::string desc;
                try {
                    desc = fmcf::load_scenario(p).description;
                } catch (const fmcf::Error& e) {
                    desc = std::string("invalid: ") + e.what();
                }
                std::cout << "  " << p.stem().string() << "  " << desc << "\n";
            }
            std::cout << "checks:\n";
            for (const auto& c : fmcf::check_names()) std::cout << "  " << c << "\n";
            return kExitPass;
        }
    } catch (const fmcf::ConfigError& e) {
        std::cerr << "fmcf: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fmcf::InputError& e) {
        std::cerr << "fmcf: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fmcf::DomainError& e) {
        std::cerr << "fmcf: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fmcf: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
