#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evtrig/io/json.hpp"

namespace evtrig::io {

/// Everything a CLI command may need. Exactly one of `plant` and
/// `reset_system` is set.
struct RunConfig {
    std::optional<lqg::PlantModel> plant;
    std::optional<lqg::ResetSystem> reset_system;

    // bound
    std::vector<double> rho;      ///< closed-form levels (A = 0)
    std::vector<double> J;        ///< grid levels (A ≠ 0), or closed-form levels when rho is empty
    Json grid = Json::object();   ///< GridSpec overrides applied on top of the defaults

    // tradeoff
    std::vector<double> periodic_h;
    std::vector<double> ellipsoid_rho;
    std::vector<double> grid_J;
    sim::SimConfig sim;

    std::string out_dir;          ///< empty when not given in the file
};

namespace detail {

inline std::vector<double> positive_list(const Json& section, const char* key, const std::string& where) {
    std::vector<double> out;
    if (!section.contains(key)) {
        return out;
    }
    const Json& v = section.at(key);
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) {
                throw ConfigError(where + "." + key + ": expected numbers");
            }
            out.push_back(x.get<double>());
        }
    } else {
        throw ConfigError(where + "." + key + ": expected a number or a list");
    }
    for (double x : out) {
        if (!(x > 0.0)) {
            throw ConfigError(where + "." + key + ": values must be positive");
        }
    }
    return out;
}

} // namespace detail

/// Parses a run configuration. Relative `plant_file` paths are resolved
/// against `base_dir` (normally the directory of the configuration file).
inline RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    const int sources = static_cast<int>(j.contains("plant")) + static_cast<int>(j.contains("plant_file")) +
                        static_cast<int>(j.contains("reset_system"));
    if (sources != 1) {
        throw ConfigError("config: give exactly one of 'plant', 'plant_file' or 'reset_system'");
    }
    RunConfig cfg;
    if (j.contains("plant")) {
        cfg.plant = plant_from_json(j.at("plant"));
    } else if (j.contains("plant_file")) {
        std::filesystem::path file = j.at("plant_file").get<std::string>();
        if (file.is_relative()) {
            file = base_dir / file;
        }
        if (!std::filesystem::exists(file)) {
            throw ConfigError("config: plant_file '" + file.string() + "' does not exist");
        }
        const Json pj = read_json_file(file.string());
        cfg.plant = plant_from_json(pj.contains("plant") ? pj.at("plant") : pj);
    } else {
        cfg.reset_system = reset_system_from_json(j.at("reset_system"));
    }

    if (j.contains("bound")) {
        const Json& b = j.at("bound");
        cfg.rho = detail::positive_list(b, "rho", "bound");
        cfg.J = detail::positive_list(b, "J", "bound");
        if (b.contains("grid")) {
            cfg.grid = b.at("grid");
            grid_spec_from_json(cfg.grid, {});
        }
    }
    if (j.contains("tradeoff")) {
        const Json& t = j.at("tradeoff");
        cfg.periodic_h = detail::positive_list(t, "periodic_h", "tradeoff");
        cfg.ellipsoid_rho = detail::positive_list(t, "ellipsoid_rho", "tradeoff");
        cfg.grid_J = detail::positive_list(t, "grid_J", "tradeoff");
        if (t.contains("sim")) {
            cfg.sim = sim_config_from_json(t.at("sim"));
        }
        if (t.contains("grid")) {
            cfg.grid = t.at("grid");
            grid_spec_from_json(cfg.grid, {});
        }
    }
    if (j.contains("out")) {
        cfg.out_dir = j.at("out").get<std::string>();
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    const Json j = read_json_file(path);
    return parse_run_config(j, std::filesystem::path(path).parent_path());
}

} // namespace evtrig::io
