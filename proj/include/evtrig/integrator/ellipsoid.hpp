#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "evtrig/integrator/riccati_like.hpp"

namespace evtrig::integrator {

/// Optimal trigger for integrator reset systems: sample when xᵀ P x reaches 2√ρ.
struct EllipsoidBound {
    Matrix P;
    double rho = 0.0;

    double level() const { return 2.0 * std::sqrt(rho); }
};

/// Builds the optimal bound for (Q, R) at per-sample cost ρ.
inline EllipsoidBound make_ellipsoid_bound(const Matrix& q, const Matrix& r, double rho) {
    if (!(rho > 0.0)) {
        throw DomainError("make_ellipsoid_bound: rho must be positive");
    }
    return EllipsoidBound{solve_riccati_like(q, r).P, rho};
}

// g(x) = 2√ρ − xᵀ P x
inline double ellipsoid_margin(const Vector& x, const Matrix& p, double rho) {
    return 2.0 * std::sqrt(rho) - x.dot(p * x);
}

/// V(x) = −¼ g(x)² inside the ellipsoid, 0 outside.
inline double value_function_integrator(const Vector& x, const Matrix& p, double rho) {
    const double g = ellipsoid_margin(x, p, rho);
    return g >= 0.0 ? -0.25 * g * g : 0.0;
}

/// ∇V = g P x inside, 0 outside.
inline Vector value_function_gradient(const Vector& x, const Matrix& p, double rho) {
    const double g = ellipsoid_margin(x, p, rho);
    if (g < 0.0) {
        return Vector::Zero(x.size());
    }
    return g * (p * x);
}

/// ∇²V = g P − 2 P x xᵀ P inside, 0 outside.
inline Matrix value_function_hessian(const Vector& x, const Matrix& p, double rho) {
    const double g = ellipsoid_margin(x, p, rho);
    if (g < 0.0) {
        return Matrix::Zero(x.size(), x.size());
    }
    const Vector px = p * x;
    return g * p - 2.0 * px * px.transpose();
}

/// Fires once the state has reached or crossed the ellipsoid surface.
inline bool ellipsoid_trigger(const Vector& x, const EllipsoidBound& bound) {
    return x.dot(bound.P * x) >= bound.level();
}

struct IntegratorCosts {
    double J;   ///< optimal total cost J_H + ρ f
    double J_H; ///< state-cost part
    double f;   ///< average sampling rate
};

/// J = √ρ Tr(R P), J_H = ρ f = J / 2.
inline IntegratorCosts integrator_costs(const Matrix& p, const Matrix& r, double rho) {
    if (rho < 0.0) {
        throw DomainError("integrator_costs: rho must be nonnegative");
    }
    const double j = std::sqrt(rho) * (r * p).trace();
    const double jh = 0.5 * j;
    const double f = rho > 0.0 ? jh / rho : std::numeric_limits<double>::infinity();
    return {j, jh, f};
}

/// Cost slopes against the average sampling period.
struct SlopePair {
    double J_e;     ///< event-based: [Tr(R P)]² / 4
    double J_p;     ///< periodic: Tr(R Q) / 2
    double J_ratio; ///< J_p / J_e
};

inline SlopePair slopes_and_ratio(const Matrix& q, const Matrix& r) {
    const RiccatiLikeSolution sol = solve_riccati_like(q, r);
    const double tr_rp = (r * sol.P).trace();
    SlopePair out{};
    out.J_e = 0.25 * tr_rp * tr_rp;
    out.J_p = 0.5 * (r * q).trace();
    out.J_ratio = out.J_p / out.J_e;
    return out;
}

/// The same ratio through the eigenvalues λ of R P: 1 + 2‖λ‖₂² / ‖λ‖₁².
inline double ratio_from_eigenvalues(const Matrix& q, const Matrix& r) {
    const Matrix p = solve_riccati_like(q, r).P;
    Eigen::EigenSolver<Matrix> es(r * p, false);
    const Vector lambda = es.eigenvalues().real();
    const double l1 = lambda.cwiseAbs().sum();
    return 1.0 + 2.0 * lambda.squaredNorm() / (l1 * l1);
}

/// Lower and upper limits of the periodic/event ratio for dimension n.
inline std::array<double, 2> ratio_bounds(Eigen::Index n) {
    if (n <= 1) {
        return {3.0, 3.0};
    }
    return {1.0 + 2.0 / static_cast<double>(n), 3.0};
}

/// Points on the 2-D bound {xᵀ P x = 2√ρ}, parameterized by angle.
inline std::vector<Eigen::Vector2d> ellipsoid_polyline(const EllipsoidBound& bound, int segments = 360) {
    if (bound.P.rows() != 2 || bound.P.cols() != 2) {
        throw DimensionError("ellipsoid_polyline: only n = 2 is supported");
    }
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(segments) + 1);
    for (int k = 0; k <= segments; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / segments;
        const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
        const double radius = std::sqrt(bound.level() / dir.dot(bound.P * dir));
        pts.push_back(radius * dir);
    }
    return pts;
}

} // namespace evtrig::integrator
