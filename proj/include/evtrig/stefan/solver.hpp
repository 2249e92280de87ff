#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/SparseLU>

#include "evtrig/stefan/boundary.hpp"
#include "evtrig/stefan/operator.hpp"

namespace evtrig::stefan {

/// Called after every linear solve with the running solve count and the
/// current stationarity measure max |ΔV| / dt.
using StepObserver = std::function<void(long step, double stationarity)>;

namespace detail {

using SparseLu = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

inline void zero_edges(Vector& u, const GridSpec& spec) {
    for (int i = 0; i <= spec.n_cells[0]; ++i) {
        u(static_cast<Eigen::Index>(spec.index(i, 0))) = 0.0;
        u(static_cast<Eigen::Index>(spec.index(i, spec.n_cells[1]))) = 0.0;
    }
    for (int j = 0; j <= spec.n_cells[1]; ++j) {
        u(static_cast<Eigen::Index>(spec.index(0, j))) = 0.0;
        u(static_cast<Eigen::Index>(spec.index(spec.n_cells[0], j))) = 0.0;
    }
}

inline std::vector<std::uint8_t> edge_flags(const GridSpec& spec) {
    std::vector<std::uint8_t> e(spec.node_count(), 0);
    for (int j = 0; j <= spec.n_cells[1]; ++j) {
        for (int i = 0; i <= spec.n_cells[0]; ++i) {
            e[spec.index(i, j)] = spec.is_edge(i, j) ? 1 : 0;
        }
    }
    return e;
}

// Semismooth Newton for the fixed point of the clamped step
//   V = min(u, 0),  (I − dt L) u = V + dt f.
// On the active set {u < 0} this reads (I − dt L − I) u = dt f, elsewhere
// (I − dt L) u = dt f with V = 0. The set is updated until it repeats.
// Returns nothing when a factorization fails or the set keeps changing.
inline std::optional<Vector> active_set_solve(const SparseMatrix& m, const Vector& f, double dt,
                                              const GridSpec& spec, long& steps,
                                              const StepObserver& observer) {
    const std::vector<std::uint8_t> edge = edge_flags(spec);
    const Eigen::Index nn = f.size();
    std::vector<std::uint8_t> active(static_cast<std::size_t>(nn));
    for (Eigen::Index k = 0; k < nn; ++k) {
        active[static_cast<std::size_t>(k)] = (f(k) < 0.0 && !edge[static_cast<std::size_t>(k)]) ? 1 : 0;
    }
    SparseLu lu;
    lu.analyzePattern(m);
    const Vector rhs = dt * f;
    Vector u;
    Vector previous = Vector::Zero(nn);
    constexpr int max_iterations = 60;
    for (int it = 0; it < max_iterations; ++it) {
        SparseMatrix jac = m;
        for (Eigen::Index k = 0; k < nn; ++k) {
            if (active[static_cast<std::size_t>(k)]) {
                jac.coeffRef(k, k) -= 1.0;
            }
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) {
            return std::nullopt;
        }
        u = lu.solve(rhs);
        if (!u.allFinite()) {
            return std::nullopt;
        }
        zero_edges(u, spec);
        ++steps;

        std::size_t changes = 0;
        for (Eigen::Index k = 0; k < nn; ++k) {
            const std::uint8_t now = (u(k) < 0.0 && !edge[static_cast<std::size_t>(k)]) ? 1 : 0;
            changes += now != active[static_cast<std::size_t>(k)];
            active[static_cast<std::size_t>(k)] = now;
        }
        const Vector v = u.cwiseMin(0.0);
        if (observer) {
            observer(steps, (v - previous).cwiseAbs().maxCoeff() / dt);
        }
        previous = v;
        if (changes == 0) {
            return v;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Stationary solution of the clamped backward-Euler iteration
///   (I − dt L) V_{k+1} = V_k + dt (xᵀ Q x − J),  V_{k+1} := min(V_{k+1}, 0),
/// started from V₀ = 0 and stopped when max |V_{k+1} − V_k| / dt < tol.
///
/// With StefanMethod::ActiveSet the stationary point is first located by a
/// semismooth Newton iteration and then confirmed by the same clamped steps,
/// which normally stop after one step. If Newton fails the plain iteration
/// runs from V₀ = 0.
inline ValueFunctionGrid stefan_solve(const lqg::ResetSystem& sys, double J, const GridSpec& spec,
                                      const StepObserver& observer = {}) {
    if (!(J > 0.0)) {
        throw DomainError("stefan_solve: J must be positive");
    }
    if (sys.Q.rows() != 2 || sys.Q.cols() != 2) {
        throw DimensionError("stefan_solve: the grid solver supports n = 2 only");
    }
    const SparseMatrix l = assemble_operator(sys, spec);
    const SparseMatrix m = step_matrix(l, spec.dt);
    const Vector f = source_term(sys, spec, J);
    const double dt = spec.dt;

    long steps = 0;
    Vector v = Vector::Zero(f.size());
    if (spec.method == StefanMethod::ActiveSet) {
        if (auto guess = detail::active_set_solve(m, f, dt, spec, steps, observer)) {
            v = std::move(*guess);
        }
    }

    detail::SparseLu lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) {
        throw NonFiniteValue("stefan_solve: factorization of I - dt L failed");
    }
    double stationarity = std::numeric_limits<double>::infinity();
    for (long k = 0; k < spec.max_steps; ++k) {
        Vector u = lu.solve(v + dt * f);
        if (!u.allFinite()) {
            throw NonFiniteValue("stefan_solve: non-finite value after step " + std::to_string(steps + 1));
        }
        detail::zero_edges(u, spec);
        u = u.cwiseMin(0.0);
        stationarity = (u - v).cwiseAbs().maxCoeff() / dt;
        v = std::move(u);
        ++steps;
        if (observer) {
            observer(steps, stationarity);
        }
        if (stationarity < spec.stationarity_tol) {
            break;
        }
    }
    if (!(stationarity < spec.stationarity_tol)) {
        std::ostringstream msg;
        msg << "stefan_solve: not stationary after " << spec.max_steps << " steps (max |dV|/dt = " << stationarity
            << ", tolerance " << spec.stationarity_tol << ")";
        throw NotStationary(msg.str());
    }

    ValueFunctionGrid grid;
    grid.spec = spec;
    grid.V = std::move(v);
    grid.J = J;
    grid.steps = steps;
    grid.stationarity = stationarity;
    grid.omega.assign(spec.node_count(), 0);
    for (std::size_t k = 0; k < spec.node_count(); ++k) {
        grid.omega[k] = grid.V(static_cast<Eigen::Index>(k)) < 0.0 ? 1 : 0;
    }
    grid.rho_effective = -grid.value(spec.n_cells[0] / 2, spec.n_cells[1] / 2);
    if (grid.touches_edge()) {
        std::ostringstream msg;
        msg << "stefan_solve: continuation region reaches the grid edge (J = " << J << ", half_width = ["
            << spec.half_width[0] << ", " << spec.half_width[1] << "]); enlarge the domain";
        throw OmegaTouchesBoundary(msg.str());
    }
    grid.level = level_field(grid);
    return grid;
}

/// Solve with default numerics for the given level.
inline ValueFunctionGrid stefan_solve(const lqg::ResetSystem& sys, double J) {
    return stefan_solve(sys, J, default_grid_spec(sys, J));
}

} // namespace evtrig::stefan
