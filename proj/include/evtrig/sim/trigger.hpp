#pragma once

#include <memory>
#include <string>
#include <variant>

#include "evtrig/integrator/ellipsoid.hpp"
#include "evtrig/stefan/boundary.hpp"

namespace evtrig::sim {

/// Sample every h time units.
struct Periodic {
    double h = 0.0;
};

/// Sample when xᵀ P x reaches 2√ρ.
struct Ellipsoid {
    integrator::EllipsoidBound bound;
};

/// Sample when the state leaves the continuation region of a solved grid.
/// The grid is shared so that sweeps and replications do not copy it.
struct GridBoundary {
    std::shared_ptr<const stefan::ValueFunctionGrid> grid;
};

using TriggerScheme = std::variant<Periodic, Ellipsoid, GridBoundary>;

inline std::string scheme_name(const TriggerScheme& trig) {
    struct Visitor {
        std::string operator()(const Periodic&) const { return "periodic"; }
        std::string operator()(const Ellipsoid&) const { return "ellipsoid"; }
        std::string operator()(const GridBoundary&) const { return "grid"; }
    };
    return std::visit(Visitor{}, trig);
}

/// The number that labels a scheme inside a sweep: h, ρ or J.
inline double scheme_parameter(const TriggerScheme& trig) {
    struct Visitor {
        double operator()(const Periodic& p) const { return p.h; }
        double operator()(const Ellipsoid& e) const { return e.bound.rho; }
        double operator()(const GridBoundary& g) const { return g.grid ? g.grid->J : 0.0; }
    };
    return std::visit(Visitor{}, trig);
}

inline void validate_trigger(const TriggerScheme& trig, Eigen::Index n) {
    if (const auto* p = std::get_if<Periodic>(&trig)) {
        if (!(p->h > 0.0)) {
            throw DomainError("Periodic trigger: h must be positive");
        }
    } else if (const auto* e = std::get_if<Ellipsoid>(&trig)) {
        if (e->bound.P.rows() != n || e->bound.P.cols() != n) {
            throw DimensionError("Ellipsoid trigger: P does not match the state dimension");
        }
        if (!(e->bound.rho > 0.0) || !is_positive_definite(e->bound.P)) {
            throw DomainError("Ellipsoid trigger: requires P positive definite and rho > 0");
        }
    } else {
        const auto& g = std::get<GridBoundary>(trig);
        if (!g.grid) {
            throw DomainError("GridBoundary trigger: no grid");
        }
        if (n != 2) {
            throw DimensionError("GridBoundary trigger: the state must be two-dimensional");
        }
    }
}

} // namespace evtrig::sim
