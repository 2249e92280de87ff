#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "evtrig/integrator/riccati_like.hpp"
#include "evtrig/lqg/design.hpp"

namespace evtrig::stefan {

/// Convection discretization. Hybrid switches a direction to first-order
/// upwinding at nodes whose cell Péclet number exceeds 2 (|a_d| Δx_d > R_dd);
/// elsewhere it coincides with central differencing.
enum class ConvectionScheme { Central, Hybrid };

/// Btcs: plain clamped pseudo-time stepping from V = 0.
/// ActiveSet: semismooth Newton on the fixed-point equation of the clamped
/// BTCS step, confirmed by ordinary BTCS steps afterwards. Both stop at the
/// same stationary point; the second needs far fewer linear solves.
enum class StefanMethod { Btcs, ActiveSet };

/// Uniform node grid on [−w₁, w₁] × [−w₂, w₂] with n_cells_d cells per axis.
struct GridSpec {
    std::array<double, 2> half_width{1.0, 1.0};
    std::array<int, 2> n_cells{256, 256};
    double dt = 0.0;
    double stationarity_tol = 0.0;
    long max_steps = 200000;
    ConvectionScheme convection = ConvectionScheme::Hybrid;
    StefanMethod method = StefanMethod::ActiveSet;

    int nodes(int axis) const { return n_cells[axis] + 1; }
    double spacing(int axis) const { return 2.0 * half_width[axis] / n_cells[axis]; }
    double coord(int axis, int i) const { return -half_width[axis] + i * spacing(axis); }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nodes(0)) * static_cast<std::size_t>(nodes(1));
    }
    // Node (i, j): i along x₁, j along x₂; rows of constant x₂ are contiguous.
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes(0)) + static_cast<std::size_t>(i);
    }
    bool is_edge(int i, int j) const {
        return i == 0 || j == 0 || i == n_cells[0] || j == n_cells[1];
    }
};

inline void validate_grid_spec(const GridSpec& spec) {
    for (int d = 0; d < 2; ++d) {
        if (!(spec.half_width[d] > 0.0)) {
            throw DomainError("GridSpec: half_width must be positive");
        }
        if (spec.n_cells[d] < 32 || spec.n_cells[d] % 2 != 0) {
            throw DomainError("GridSpec: n_cells must be even and at least 32");
        }
    }
    if (!(spec.dt > 0.0) || !(spec.stationarity_tol > 0.0) || spec.max_steps <= 0) {
        throw DomainError("GridSpec: dt, stationarity_tol and max_steps must be positive");
    }
}

/// Converged value function on the grid.
struct ValueFunctionGrid {
    GridSpec spec;
    Vector V;                          ///< node values, V ≤ 0
    std::vector<std::uint8_t> omega;   ///< 1 where V < 0 (continuation set)
    Vector level;                      ///< signed boundary field, > 0 exactly on Ω
    double J = 0.0;
    double rho_effective = 0.0;        ///< −V(0)
    long steps = 0;                    ///< linear solves performed
    double stationarity = 0.0;         ///< final max |ΔV| / dt

    double value(int i, int j) const { return V(static_cast<Eigen::Index>(spec.index(i, j))); }
    bool in_omega(int i, int j) const { return omega[spec.index(i, j)] != 0; }
    std::size_t omega_count() const {
        std::size_t c = 0;
        for (auto m : omega) {
            c += m;
        }
        return c;
    }
    /// Ω area counted as one cell per node.
    double omega_area() const { return omega_count() * spec.spacing(0) * spec.spacing(1); }
    bool touches_edge() const {
        const int n0 = spec.n_cells[0];
        const int n1 = spec.n_cells[1];
        for (int i = 0; i <= n0; ++i) {
            if (in_omega(i, 0) || in_omega(i, 1) || in_omega(i, n1 - 1) || in_omega(i, n1)) {
                return true;
            }
        }
        for (int j = 0; j <= n1; ++j) {
            if (in_omega(0, j) || in_omega(1, j) || in_omega(n0 - 1, j) || in_omega(n0, j)) {
                return true;
            }
        }
        return false;
    }
};

/// Default numerics for a given level J: the domain is three times the
/// radius of the closed-form ellipse of (Q, R) with the drift ignored,
/// 256 cells per axis, dt = (min Δx)² / λ_min(R), tolerance 1e-6 J.
inline GridSpec default_grid_spec(const lqg::ResetSystem& sys, double J) {
    if (!(J > 0.0)) {
        throw DomainError("default_grid_spec: J must be positive");
    }
    const integrator::RiccatiLikeSolution sol = integrator::solve_riccati_like(sys.Q, sys.R);
    const double tr_rp = (sys.R * sol.P).trace();
    const double rho = (J / tr_rp) * (J / tr_rp);
    const double lambda_min = symmetric_eigenvalues(sol.P).minCoeff();
    const double radius = std::sqrt(2.0 * std::sqrt(rho) / lambda_min);

    GridSpec spec;
    spec.half_width = {3.0 * radius, 3.0 * radius};
    spec.n_cells = {256, 256};
    const double dx = std::min(spec.spacing(0), spec.spacing(1));
    const Vector r_eig = symmetric_eigenvalues(sys.R);
    spec.dt = dx * dx / r_eig.minCoeff();
    spec.stationarity_tol = 1e-6 * J;
    spec.max_steps = 200000;
    return spec;
}

/// Keeps the domain of `spec` but changes the resolution; dt follows (min Δx)².
inline GridSpec with_resolution(GridSpec spec, int n_cells, const Matrix& r) {
    const double old_dx = std::min(spec.spacing(0), spec.spacing(1));
    spec.n_cells = {n_cells, n_cells};
    const double dx = std::min(spec.spacing(0), spec.spacing(1));
    if (r.size() > 0) {
        spec.dt = dx * dx / symmetric_eigenvalues(r).minCoeff();
    } else {
        spec.dt *= (dx / old_dx) * (dx / old_dx);
    }
    return spec;
}

} // namespace evtrig::stefan
