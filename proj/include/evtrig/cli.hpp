#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "evtrig/io/config.hpp"
#include "evtrig/io/csv.hpp"
#include "evtrig/sim/sweep.hpp"

namespace evtrig::cli {

/// Process exit codes.
enum Exit : int {
    Ok = 0,
    Usage = 1,
    Invalid = 2,      ///< configuration or plant validation failure
    SolverFailed = 3, ///< Riccati/design failure, or no trade-off point succeeded
    GridFailed = 4,   ///< grid solve not stationary or domain too small
};

struct Options {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Destination for human-readable summaries and diagnostics.
struct Streams {
    std::ostream& out = std::cout;
    std::ostream& err = std::cerr;
};

namespace detail {

struct Resolved {
    lqg::ResetSystem sys;
    double gamma0 = 0.0;
    bool has_plant = false;
};

inline std::filesystem::path output_dir(const Options& opt, const io::RunConfig& cfg) {
    std::filesystem::path dir = !opt.out_dir.empty() ? opt.out_dir : (!cfg.out_dir.empty() ? cfg.out_dir : ".");
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline bool drift_is_zero(const lqg::ResetSystem& s) {
    return s.A.norm() <= 1e-12 * (1.0 + s.Q.norm() + s.R.norm());
}

// Returns an exit code when the plant cannot be designed.
inline std::optional<int> resolve(const io::RunConfig& cfg, Resolved& r, Streams io) {
    if (cfg.reset_system) {
        r.sys = *cfg.reset_system;
        return std::nullopt;
    }
    const auto violations = lqg::validate_plant(*cfg.plant);
    if (!violations.empty()) {
        io.err << "plant validation failed:\n";
        for (const auto& v : violations) {
            io.err << "  " << v << '\n';
        }
        return Invalid;
    }
    try {
        const lqg::LqgDesign d = lqg::design_lqg(*cfg.plant);
        r.sys = lqg::build_reset_system(*cfg.plant, d);
        r.gamma0 = d.gamma0;
        r.has_plant = true;
    } catch (const Error& e) {
        io.err << "design failed: " << e.what() << '\n';
        return SolverFailed;
    }
    return std::nullopt;
}

inline stefan::GridSpec grid_for(const io::RunConfig& cfg, const lqg::ResetSystem& sys, double J) {
    stefan::GridSpec spec = stefan::default_grid_spec(sys, J);
    const int default_cells = spec.n_cells[0];
    spec = io::grid_spec_from_json(cfg.grid, spec);
    // A resolution override without an explicit dt keeps dt tied to Δx².
    if (spec.n_cells[0] != default_cells && !cfg.grid.contains("dt")) {
        const double dx = std::min(spec.spacing(0), spec.spacing(1));
        spec.dt = dx * dx / symmetric_eigenvalues(sys.R).minCoeff();
    }
    return spec;
}

} // namespace detail

/// Writes design.json (plant, design, reset system, γ₀) and prints γ₀.
inline int cmd_design(const io::RunConfig& cfg, const Options& opt, Streams io = {}) {
    if (!cfg.plant) {
        io.err << "design: the configuration must provide a plant\n";
        return Invalid;
    }
    const auto violations = lqg::validate_plant(*cfg.plant);
    if (!violations.empty()) {
        io.err << "plant validation failed:\n";
        for (const auto& v : violations) {
            io.err << "  " << v << '\n';
        }
        return Invalid;
    }
    lqg::LqgDesign d;
    try {
        d = lqg::design_lqg(*cfg.plant);
    } catch (const Error& e) {
        io.err << "design failed: " << e.what() << '\n';
        return SolverFailed;
    }
    const lqg::ResetSystem sys = lqg::build_reset_system(*cfg.plant, d);
    const auto dir = detail::output_dir(opt, cfg);
    io::write_json_file((dir / "design.json").string(), io::design_report(*cfg.plant, d, sys));
    if (!opt.quiet) {
        io.out << "gamma0 = " << io::fmt(d.gamma0) << '\n';
    }
    return Ok;
}

/// Closed-form ellipsoids when the drift vanishes, grid solves otherwise.
inline int cmd_bound(const io::RunConfig& cfg, const Options& opt, Streams io = {}) {
    detail::Resolved r;
    if (auto code = detail::resolve(cfg, r, io)) {
        return *code;
    }
    const auto dir = detail::output_dir(opt, cfg);
    io::Json summary = io::Json::array();

    if (detail::drift_is_zero(r.sys)) {
        std::vector<double> rhos = cfg.rho;
        try {
            if (rhos.empty()) {
                const double tr = (r.sys.R * integrator::solve_riccati_like(r.sys.Q, r.sys.R).P).trace();
                for (double J : cfg.J) {
                    rhos.push_back((J / tr) * (J / tr));
                }
            }
            if (rhos.empty()) {
                io.err << "bound: no rho or J values given\n";
                return Invalid;
            }
            for (double rho : rhos) {
                const auto bound = integrator::make_ellipsoid_bound(r.sys.Q, r.sys.R, rho);
                const std::string stem = "ellipsoid_rho_" + detail::label(rho);
                io::write_json_file((dir / (stem + ".json")).string(), io::to_json(bound));
                if (bound.P.rows() == 2) {
                    io::write_polyline_csv((dir / (stem + ".csv")).string(), integrator::ellipsoid_polyline(bound));
                }
                const auto costs = integrator::integrator_costs(bound.P, r.sys.R, rho);
                summary.push_back({{"rho", rho}, {"J", costs.J}, {"J_H", costs.J_H}, {"f", costs.f}, {"file", stem}});
                if (!opt.quiet) {
                    io.out << "rho = " << io::fmt(rho) << "  J = " << io::fmt(costs.J) << '\n';
                }
            }
        } catch (const Error& e) {
            io.err << "bound: " << e.what() << '\n';
            return Invalid;
        }
    } else {
        if (cfg.J.empty()) {
            io.err << "bound: no J values given for the grid solver\n";
            return Invalid;
        }
        for (double J : cfg.J) {
            try {
                const stefan::GridSpec spec = detail::grid_for(cfg, r.sys, J);
                const auto grid = stefan::stefan_solve(r.sys, J, spec);
                const auto poly = stefan::extract_boundary(grid);
                const std::string tag = "J_" + detail::label(J);
                io::write_grid_csv((dir / ("grid_" + tag + ".csv")).string(), grid);
                io::write_polyline_csv((dir / ("boundary_" + tag + ".csv")).string(), poly.points);
                summary.push_back({{"J", J},
                                   {"rho_effective", grid.rho_effective},
                                   {"steps", grid.steps},
                                   {"convexity_defect", stefan::convexity_defect(poly)},
                                   {"grid", io::to_json(spec)}});
                if (!opt.quiet) {
                    io.out << "J = " << io::fmt(J) << "  rho_effective = " << io::fmt(grid.rho_effective) << '\n';
                }
            } catch (const NotStationary& e) {
                io.err << "bound: " << e.what() << '\n';
                return GridFailed;
            } catch (const OmegaTouchesBoundary& e) {
                io.err << "bound: " << e.what() << '\n';
                return GridFailed;
            } catch (const Error& e) {
                io.err << "bound: " << e.what() << '\n';
                return Invalid;
            }
        }
    }
    io::write_json_file((dir / "bound_summary.json").string(), summary);
    return Ok;
}

/// Periodic points from the closed form, event-based points by simulation.
inline int cmd_tradeoff(const io::RunConfig& cfg, const Options& opt, Streams io = {}) {
    detail::Resolved r;
    if (auto code = detail::resolve(cfg, r, io)) {
        return *code;
    }
    sim::SimConfig sc = cfg.sim;
    if (opt.seed) {
        sc.seed = *opt.seed;
    }
    const auto dir = detail::output_dir(opt, cfg);
    std::vector<sim::TradeoffPoint> rows;
    std::vector<sim::SweepFailure> failures;
    std::vector<std::pair<std::string, double>> slopes;

    auto run = [&](sim::SchemeFamily family, const std::vector<double>& values, const char* name) {
        if (values.empty()) {
            return;
        }
        sim::SweepResult res;
        try {
            res = sim::tradeoff_sweep(r.sys, r.gamma0, family, values, sc, [&](const lqg::ResetSystem& s, double J) {
                return detail::grid_for(cfg, s, J);
            });
        } catch (const Error& e) {
            failures.push_back({0.0, e.what()});
            return;
        }
        rows.insert(rows.end(), res.points.begin(), res.points.end());
        failures.insert(failures.end(), res.failures.begin(), res.failures.end());
        if (detail::drift_is_zero(r.sys) && !res.points.empty()) {
            slopes.emplace_back(name, sim::fit_slope(res.points));
        }
    };
    run(sim::SchemeFamily::Periodic, cfg.periodic_h, "periodic");
    run(sim::SchemeFamily::Ellipsoid, cfg.ellipsoid_rho, "ellipsoid");
    run(sim::SchemeFamily::GridBoundary, cfg.grid_J, "grid");

    io::write_tradeoff_csv((dir / "tradeoff.csv").string(), rows);
    for (const auto& f : failures) {
        io.err << "tradeoff: value " << io::fmt(f.param) << " failed: " << f.error << '\n';
    }
    if (!opt.quiet) {
        io.out << "points = " << rows.size() << "  failures = " << failures.size() << '\n';
        for (const auto& [name, slope] : slopes) {
            io.out << "slope " << name << " = " << io::fmt(slope) << '\n';
        }
    }
    return rows.empty() ? SolverFailed : Ok;
}

/// Slopes and their ratio for a drift-free system, with the dimension bounds.
inline int cmd_ratio(const io::RunConfig& cfg, const Options& opt, Streams io = {}) {
    detail::Resolved r;
    if (auto code = detail::resolve(cfg, r, io)) {
        return *code;
    }
    if (!detail::drift_is_zero(r.sys)) {
        io.err << "ratio: defined for systems without drift (A = 0) only\n";
        return Invalid;
    }
    integrator::SlopePair s;
    try {
        s = integrator::slopes_and_ratio(r.sys.Q, r.sys.R);
    } catch (const Error& e) {
        io.err << "ratio: " << e.what() << '\n';
        return Invalid;
    }
    const auto bounds = integrator::ratio_bounds(r.sys.states());
    const bool within = r.sys.states() == 1 ? std::abs(s.J_ratio - 3.0) <= 1e-9
                                            : s.J_ratio >= bounds[0] - 1e-12 && s.J_ratio < bounds[1];
    const auto dir = detail::output_dir(opt, cfg);
    io::write_json_file((dir / "ratio.json").string(), io::Json{{"J_p", s.J_p},
                                                               {"J_e", s.J_e},
                                                               {"J_ratio", s.J_ratio},
                                                               {"lower_bound", bounds[0]},
                                                               {"upper_bound", bounds[1]},
                                                               {"within_bounds", within}});
    if (!opt.quiet) {
        io.out << "J_p = " << io::fmt(s.J_p) << '\n'
               << "J_e = " << io::fmt(s.J_e) << '\n'
               << "J_ratio = " << io::fmt(s.J_ratio) << '\n'
               << "bounds [" << io::fmt(bounds[0]) << ", " << io::fmt(bounds[1]) << ") "
               << (within ? "hold" : "VIOLATED") << '\n';
    }
    return within ? Ok : SolverFailed;
}

/// Loads the configuration and dispatches; every library error becomes an exit code.
inline int run_command(const std::string& command, const Options& opt, Streams io = {}) {
    io::RunConfig cfg;
    try {
        cfg = io::load_run_config(opt.config);
    } catch (const Error& e) {
        io.err << "config: " << e.what() << '\n';
        return Invalid;
    } catch (const io::Json::exception& e) {
        io.err << "config: " << e.what() << '\n';
        return Invalid;
    }
    try {
        if (command == "design") return cmd_design(cfg, opt, io);
        if (command == "bound") return cmd_bound(cfg, opt, io);
        if (command == "tradeoff") return cmd_tradeoff(cfg, opt, io);
        if (command == "ratio") return cmd_ratio(cfg, opt, io);
    } catch (const std::filesystem::filesystem_error& e) {
        io.err << command << ": " << e.what() << '\n';
        return Invalid;
    } catch (const Error& e) {
        io.err << command << ": " << e.what() << '\n';
        return Invalid;
    }
    io.err << "unknown command '" << command << "'\n";
    return Usage;
}

} // namespace evtrig::cli
