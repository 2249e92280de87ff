#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "evtrig/sim/periodic.hpp"
#include "evtrig/sim/simulate.hpp"
#include "evtrig/stefan/solver.hpp"

namespace evtrig::sim {

enum class SchemeFamily { Periodic, Ellipsoid, GridBoundary };

/// A sweep value that did not produce a point.
struct SweepFailure {
    double param = 0.0;
    std::string error;
};

struct SweepResult {
    std::vector<TradeoffPoint> points; ///< sorted by h_avg
    std::vector<SweepFailure> failures;
};

/// Grid numerics for a given J; defaults to stefan::default_grid_spec.
using GridSpecFactory = std::function<stefan::GridSpec(const lqg::ResetSystem&, double J)>;

/// Trade-off curve for one scheme family.
///
///   Periodic:     values are sampling periods h, costs from periodic_cost.
///   Ellipsoid:    values are ρ; P solves the Riccati-like equation for (Q, R).
///   GridBoundary: values are J; each J is solved on a grid, then simulated.
///
/// A failing value is recorded and the sweep continues.
inline SweepResult tradeoff_sweep(const lqg::ResetSystem& sys, double gamma0, SchemeFamily family,
                                  const std::vector<double>& values, const SimConfig& cfg,
                                  const GridSpecFactory& grid_spec = {}) {
    if (values.empty()) {
        throw DomainError("tradeoff_sweep: no sweep values");
    }
    SweepResult out;
    for (double v : values) {
        try {
            switch (family) {
            case SchemeFamily::Periodic: {
                TradeoffPoint pt;
                pt.J_H_hat = periodic_cost(sys, v);
                pt.J_z_hat = gamma0 + pt.J_H_hat;
                pt.h_avg = v;
                pt.f_hat = 1.0 / v;
                pt.scheme = "periodic";
                pt.param = v;
                out.points.push_back(pt);
                break;
            }
            case SchemeFamily::Ellipsoid: {
                const TriggerScheme trig = Ellipsoid{integrator::make_ellipsoid_bound(sys.Q, sys.R, v)};
                out.points.push_back(simulate(sys, trig, cfg, gamma0));
                break;
            }
            case SchemeFamily::GridBoundary: {
                const stefan::GridSpec spec = grid_spec ? grid_spec(sys, v) : stefan::default_grid_spec(sys, v);
                auto grid = std::make_shared<const stefan::ValueFunctionGrid>(stefan::stefan_solve(sys, v, spec));
                out.points.push_back(simulate(sys, GridBoundary{grid}, cfg, gamma0));
                break;
            }
            }
        } catch (const Error& e) {
            out.failures.push_back({v, e.what()});
        }
    }
    std::stable_sort(out.points.begin(), out.points.end(),
                     [](const TradeoffPoint& a, const TradeoffPoint& b) { return a.h_avg < b.h_avg; });
    return out;
}

/// Least-squares slope through the origin of J_H against h_avg.
inline double fit_slope(const std::vector<TradeoffPoint>& points) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& p : points) {
        if (std::isfinite(p.h_avg)) {
            num += p.h_avg * p.J_H_hat;
            den += p.h_avg * p.h_avg;
        }
    }
    if (den == 0.0) {
        throw DomainError("fit_slope: no finite points");
    }
    return num / den;
}

} // namespace evtrig::sim
