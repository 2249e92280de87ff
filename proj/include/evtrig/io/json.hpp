#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "evtrig/integrator/ellipsoid.hpp"
#include "evtrig/lqg/design.hpp"
#include "evtrig/sim/simulate.hpp"
#include "evtrig/stefan/grid.hpp"

namespace evtrig::io {

using Json = nlohmann::json;

/// Row-major nested array; a 0×k matrix becomes [] and loses k.
inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
    if (j.is_number()) {
        Matrix m(1, 1);
        m(0, 0) = j.get<double>();
        return m;
    }
    if (!j.is_array()) {
        throw ConfigError(what + ": expected a nested array of numbers");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) {
        return Matrix(0, 0);
    }
    if (!j[0].is_array()) {
        throw ConfigError(what + ": expected a nested array of numbers");
    }
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(what + ": ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) {
                throw ConfigError(what + ": non-numeric entry");
            }
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

inline Json dims(const Matrix& m) { return Json::array({m.rows(), m.cols()}); }

inline const Json& require(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    return j.at(key);
}

// Plant --------------------------------------------------------------------

inline Json to_json(const lqg::PlantModel& p) {
    Json j;
    j["dimensions"] = {{"n", p.states()}, {"m_w", p.B_w.cols()}, {"m_u", p.B_u.cols()},
                       {"p_z", p.C_z.rows()}, {"p_y", p.C_y.rows()}};
    j["A"] = matrix_to_json(p.A);
    j["B_w"] = matrix_to_json(p.B_w);
    j["B_u"] = matrix_to_json(p.B_u);
    j["C_z"] = matrix_to_json(p.C_z);
    j["D_zu"] = matrix_to_json(p.D_zu);
    j["C_y"] = matrix_to_json(p.C_y);
    j["D_yw"] = matrix_to_json(p.D_yw);
    return j;
}

inline lqg::PlantModel plant_from_json(const Json& j) {
    lqg::PlantModel p;
    p.A = matrix_from_json(require(j, "A", "plant"), "plant.A");
    p.B_w = matrix_from_json(require(j, "B_w", "plant"), "plant.B_w");
    p.B_u = matrix_from_json(require(j, "B_u", "plant"), "plant.B_u");
    p.C_z = matrix_from_json(require(j, "C_z", "plant"), "plant.C_z");
    p.D_zu = matrix_from_json(require(j, "D_zu", "plant"), "plant.D_zu");
    p.C_y = matrix_from_json(require(j, "C_y", "plant"), "plant.C_y");
    p.D_yw = matrix_from_json(require(j, "D_yw", "plant"), "plant.D_yw");
    return p;
}

// Design and reset system ----------------------------------------------------

inline Json to_json(const lqg::ResetSystem& s) {
    Json j;
    j["dimensions"] = {{"n", s.states()}};
    j["A"] = matrix_to_json(s.A);
    j["Q"] = matrix_to_json(s.Q);
    j["R"] = matrix_to_json(s.R);
    return j;
}

inline lqg::ResetSystem reset_system_from_json(const Json& j) {
    lqg::ResetSystem s;
    s.A = matrix_from_json(require(j, "A", "reset_system"), "reset_system.A");
    s.Q = matrix_from_json(require(j, "Q", "reset_system"), "reset_system.Q");
    s.R = matrix_from_json(require(j, "R", "reset_system"), "reset_system.R");
    const Eigen::Index n = s.A.rows();
    if (!is_square(s.A) || s.Q.rows() != n || s.Q.cols() != n || s.R.rows() != n || s.R.cols() != n) {
        throw ConfigError("reset_system: A, Q and R must be n x n");
    }
    return s;
}

inline Json to_json(const lqg::LqgDesign& d) {
    Json j;
    j["dimensions"] = {{"n", d.X.rows()}, {"m_u", d.F.rows()}, {"p_y", d.L.cols()}};
    j["X"] = matrix_to_json(d.X);
    j["Y"] = matrix_to_json(d.Y);
    j["F"] = matrix_to_json(d.F);
    j["L"] = matrix_to_json(d.L);
    j["gamma0"] = d.gamma0;
    return j;
}

inline lqg::LqgDesign design_from_json(const Json& j) {
    lqg::LqgDesign d;
    d.X = matrix_from_json(require(j, "X", "design"), "design.X");
    d.Y = matrix_from_json(require(j, "Y", "design"), "design.Y");
    d.F = matrix_from_json(require(j, "F", "design"), "design.F");
    d.L = matrix_from_json(require(j, "L", "design"), "design.L");
    d.gamma0 = require(j, "gamma0", "design").get<double>();
    return d;
}

/// Report written by the design command.
inline Json design_report(const lqg::PlantModel& p, const lqg::LqgDesign& d, const lqg::ResetSystem& s) {
    Json j;
    j["gamma0"] = d.gamma0;
    j["plant"] = to_json(p);
    j["design"] = to_json(d);
    j["reset_system"] = to_json(s);
    const auto res = lqg::design_residuals(p, d);
    j["residuals"] = {{"control", res.control}, {"filter", res.filter}};
    return j;
}

// Ellipsoid bound -------------------------------------------------------------

inline Json to_json(const integrator::EllipsoidBound& b) {
    Json j;
    j["dimensions"] = {{"n", b.P.rows()}};
    j["P"] = matrix_to_json(b.P);
    j["rho"] = b.rho;
    j["level"] = b.level();
    return j;
}

inline integrator::EllipsoidBound ellipsoid_from_json(const Json& j) {
    integrator::EllipsoidBound b;
    b.P = matrix_from_json(require(j, "P", "ellipsoid"), "ellipsoid.P");
    b.rho = require(j, "rho", "ellipsoid").get<double>();
    return b;
}

// Grid and simulation settings -------------------------------------------------

inline const char* to_string(stefan::StefanMethod m) {
    return m == stefan::StefanMethod::ActiveSet ? "active_set" : "btcs";
}

inline const char* to_string(stefan::ConvectionScheme c) {
    return c == stefan::ConvectionScheme::Hybrid ? "hybrid" : "central";
}

inline Json to_json(const stefan::GridSpec& g) {
    Json j;
    j["half_width"] = {g.half_width[0], g.half_width[1]};
    j["n_cells"] = {g.n_cells[0], g.n_cells[1]};
    j["dt"] = g.dt;
    j["stationarity_tol"] = g.stationarity_tol;
    j["max_steps"] = g.max_steps;
    j["method"] = to_string(g.method);
    j["convection"] = to_string(g.convection);
    return j;
}

/// Applies the fields present in `j` on top of `base`. Scalars given for
/// half_width or n_cells apply to both axes.
inline stefan::GridSpec grid_spec_from_json(const Json& j, stefan::GridSpec base) {
    if (!j.is_object()) {
        throw ConfigError("grid: expected an object");
    }
    auto pair_double = [&](const char* key, std::array<double, 2>& out) {
        if (!j.contains(key)) return;
        const Json& v = j.at(key);
        if (v.is_number()) {
            out = {v.get<double>(), v.get<double>()};
        } else if (v.is_array() && v.size() == 2) {
            out = {v[0].get<double>(), v[1].get<double>()};
        } else {
            throw ConfigError(std::string("grid.") + key + ": expected a number or a pair");
        }
    };
    pair_double("half_width", base.half_width);
    if (j.contains("n_cells")) {
        const Json& v = j.at("n_cells");
        if (v.is_number_integer()) {
            base.n_cells = {v.get<int>(), v.get<int>()};
        } else if (v.is_array() && v.size() == 2) {
            base.n_cells = {v[0].get<int>(), v[1].get<int>()};
        } else {
            throw ConfigError("grid.n_cells: expected an integer or a pair");
        }
    }
    if (j.contains("dt")) base.dt = j.at("dt").get<double>();
    if (j.contains("stationarity_tol")) base.stationarity_tol = j.at("stationarity_tol").get<double>();
    if (j.contains("max_steps")) base.max_steps = j.at("max_steps").get<long>();
    if (j.contains("method")) {
        const auto m = j.at("method").get<std::string>();
        if (m == "active_set") {
            base.method = stefan::StefanMethod::ActiveSet;
        } else if (m == "btcs") {
            base.method = stefan::StefanMethod::Btcs;
        } else {
            throw ConfigError("grid.method: expected 'active_set' or 'btcs'");
        }
    }
    if (j.contains("convection")) {
        const auto c = j.at("convection").get<std::string>();
        if (c == "hybrid") {
            base.convection = stefan::ConvectionScheme::Hybrid;
        } else if (c == "central") {
            base.convection = stefan::ConvectionScheme::Central;
        } else {
            throw ConfigError("grid.convection: expected 'hybrid' or 'central'");
        }
    }
    return base;
}

inline Json to_json(const sim::SimConfig& c) {
    return Json{{"h_nom", c.h_nom}, {"T", c.T}, {"seed", c.seed}, {"n_reps", c.n_reps}};
}

inline sim::SimConfig sim_config_from_json(const Json& j, sim::SimConfig base = {}) {
    if (!j.is_object()) {
        throw ConfigError("sim: expected an object");
    }
    if (j.contains("h_nom")) base.h_nom = j.at("h_nom").get<double>();
    if (j.contains("T")) base.T = j.at("T").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_reps")) base.n_reps = j.at("n_reps").get<int>();
    if (!(base.h_nom > 0.0) || !(base.T > 0.0) || base.n_reps < 1) {
        throw ConfigError("sim: h_nom, T and n_reps must be positive");
    }
    return base;
}

// Files ----------------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

} // namespace evtrig::io
