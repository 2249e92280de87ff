#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evtrig/errors.hpp"
#include "evtrig/sim/simulate.hpp"
#include "evtrig/stefan/boundary.hpp"

namespace evtrig::io {

/// %.17g, enough to round-trip any double.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    return out;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(item);
    }
    if (!line.empty() && line.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError(what + ": trailing characters in '" + s + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(what + ": not a number: '" + s + "'");
    }
}

// Grid ------------------------------------------------------------------------
//
// key,value lines (n_cells_x1, n_cells_x2, half_width_x1, half_width_x2,
// dx1, dx2, J, rho_effective), then a line "V", then one line per x₂ index
// holding the values along x₁.

inline void write_grid_csv(std::ostream& out, const stefan::ValueFunctionGrid& g) {
    const auto& s = g.spec;
    out << "n_cells_x1," << s.n_cells[0] << '\n';
    out << "n_cells_x2," << s.n_cells[1] << '\n';
    out << "half_width_x1," << fmt(s.half_width[0]) << '\n';
    out << "half_width_x2," << fmt(s.half_width[1]) << '\n';
    out << "dx1," << fmt(s.spacing(0)) << '\n';
    out << "dx2," << fmt(s.spacing(1)) << '\n';
    out << "J," << fmt(g.J) << '\n';
    out << "rho_effective," << fmt(g.rho_effective) << '\n';
    out << "V\n";
    for (int j = 0; j <= s.n_cells[1]; ++j) {
        for (int i = 0; i <= s.n_cells[0]; ++i) {
            if (i > 0) out << ',';
            out << fmt(g.value(i, j));
        }
        out << '\n';
    }
}

inline void write_grid_csv(const std::string& path, const stefan::ValueFunctionGrid& g) {
    auto out = open_for_write(path);
    write_grid_csv(out, g);
}

/// Reads a grid written by write_grid_csv. Numerical settings that are not
/// stored (dt, tolerance) are left at zero; Ω and the level field are rebuilt.
inline stefan::ValueFunctionGrid read_grid_csv(std::istream& in) {
    stefan::ValueFunctionGrid g;
    std::string line;
    bool have_values = false;
    while (std::getline(in, line)) {
        if (line == "V") {
            have_values = true;
            break;
        }
        const auto parts = split(line);
        if (parts.size() != 2) {
            throw ConfigError("grid csv: malformed header line '" + line + "'");
        }
        const std::string& key = parts[0];
        const double v = parse_double(parts[1], "grid csv " + key);
        if (key == "n_cells_x1") g.spec.n_cells[0] = static_cast<int>(v);
        else if (key == "n_cells_x2") g.spec.n_cells[1] = static_cast<int>(v);
        else if (key == "half_width_x1") g.spec.half_width[0] = v;
        else if (key == "half_width_x2") g.spec.half_width[1] = v;
        else if (key == "J") g.J = v;
        else if (key == "rho_effective") g.rho_effective = v;
    }
    if (!have_values) {
        throw ConfigError("grid csv: missing V block");
    }
    g.V = Vector::Zero(static_cast<Eigen::Index>(g.spec.node_count()));
    for (int j = 0; j <= g.spec.n_cells[1]; ++j) {
        if (!std::getline(in, line)) {
            throw ConfigError("grid csv: truncated V block");
        }
        const auto parts = split(line);
        if (static_cast<int>(parts.size()) != g.spec.nodes(0)) {
            throw ConfigError("grid csv: wrong row length");
        }
        for (int i = 0; i <= g.spec.n_cells[0]; ++i) {
            g.V(static_cast<Eigen::Index>(g.spec.index(i, j))) = parse_double(parts[static_cast<std::size_t>(i)], "grid csv V");
        }
    }
    g.omega.assign(g.spec.node_count(), 0);
    for (std::size_t k = 0; k < g.spec.node_count(); ++k) {
        g.omega[k] = g.V(static_cast<Eigen::Index>(k)) < 0.0 ? 1 : 0;
    }
    g.level = stefan::level_field(g);
    return g;
}

// Polylines -------------------------------------------------------------------

inline void write_polyline_csv(std::ostream& out, const std::vector<Eigen::Vector2d>& pts) {
    out << "x1,x2\n";
    for (const auto& p : pts) {
        out << fmt(p.x()) << ',' << fmt(p.y()) << '\n';
    }
}

inline void write_polyline_csv(const std::string& path, const std::vector<Eigen::Vector2d>& pts) {
    auto out = open_for_write(path);
    write_polyline_csv(out, pts);
}

inline std::vector<Eigen::Vector2d> read_polyline_csv(std::istream& in) {
    std::vector<Eigen::Vector2d> pts;
    std::string line;
    if (!std::getline(in, line) || line != "x1,x2") {
        throw ConfigError("polyline csv: expected header 'x1,x2'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line);
        if (parts.size() != 2) {
            throw ConfigError("polyline csv: expected two columns");
        }
        pts.emplace_back(parse_double(parts[0], "x1"), parse_double(parts[1], "x2"));
    }
    return pts;
}

// Trade-off table ---------------------------------------------------------------

inline constexpr const char* tradeoff_header = "h_avg,J_H,J_z,stderr,n_samples,scheme,param";

inline void write_tradeoff_csv(std::ostream& out, const std::vector<sim::TradeoffPoint>& points) {
    out << tradeoff_header << '\n';
    for (const auto& p : points) {
        out << fmt(p.h_avg) << ',' << fmt(p.J_H_hat) << ',' << fmt(p.J_z_hat) << ',' << fmt(p.std_error) << ','
            << p.n_samples << ',' << p.scheme << ',' << fmt(p.param) << '\n';
    }
}

inline void write_tradeoff_csv(const std::string& path, const std::vector<sim::TradeoffPoint>& points) {
    auto out = open_for_write(path);
    write_tradeoff_csv(out, points);
}

inline std::vector<sim::TradeoffPoint> read_tradeoff_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != tradeoff_header) {
        throw ConfigError("tradeoff csv: unexpected header");
    }
    std::vector<sim::TradeoffPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line);
        if (parts.size() != 7) {
            throw ConfigError("tradeoff csv: expected seven columns");
        }
        sim::TradeoffPoint p;
        p.h_avg = parse_double(parts[0], "h_avg");
        p.J_H_hat = parse_double(parts[1], "J_H");
        p.J_z_hat = parse_double(parts[2], "J_z");
        p.std_error = parse_double(parts[3], "stderr");
        p.n_samples = static_cast<long>(parse_double(parts[4], "n_samples"));
        p.scheme = parts[5];
        p.param = parse_double(parts[6], "param");
        p.f_hat = p.h_avg > 0.0 ? 1.0 / p.h_avg : 0.0;
        points.push_back(p);
    }
    return points;
}

// Trace -------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& out, const std::vector<sim::TraceRow>& rows) {
    out << "t";
    const Eigen::Index n = rows.empty() ? 0 : rows.front().x.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        out << ",x" << (i + 1);
    }
    out << ",sampled\n";
    for (const auto& r : rows) {
        out << fmt(r.t);
        for (Eigen::Index i = 0; i < n; ++i) {
            out << ',' << fmt(r.x(i));
        }
        out << ',' << (r.sampled ? 1 : 0) << '\n';
    }
}

} // namespace evtrig::io
