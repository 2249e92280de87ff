#pragma once

#include <cmath>
#include <limits>

#include "evtrig/linalg.hpp"

namespace evtrig::integrator {

/// h(s) = (n + 4) s − Σ_j √(s² + 16 r_j). Strictly increasing with h' > 4.
inline double scalar_h(double s, const Vector& r) {
    if (!(s > 0.0)) {
        throw DomainError("scalar_h: s must be positive");
    }
    const double n = static_cast<double>(r.size());
    return (n + 4.0) * s - (s * s + 16.0 * r.array()).sqrt().sum();
}

inline double scalar_h_derivative(double s, const Vector& r) {
    const double n = static_cast<double>(r.size());
    return (n + 4.0) - (s / (s * s + 16.0 * r.array()).sqrt()).sum();
}

/// Unique positive root of scalar_h. Bisection on (tiny, Σ√r_j], where the
/// upper end is always nonnegative, followed by a Newton polish.
inline double solve_scalar_h(const Vector& r) {
    if (r.size() == 0 || !(r.minCoeff() > 0.0)) {
        throw DomainError("solve_scalar_h: eigenvalues must be positive");
    }
    double lo = std::numeric_limits<double>::min();
    double hi = r.cwiseSqrt().sum();
    while (scalar_h(hi, r) < 0.0) {
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (scalar_h(mid, r) < 0.0 ? lo : hi) = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double step = scalar_h(s, r) / scalar_h_derivative(s, r);
        const double next = s - step;
        if (!(next > 0.0) || std::abs(scalar_h(next, r)) >= std::abs(scalar_h(s, r))) {
            break;
        }
        s = next;
    }
    return s;
}

struct RiccatiLikeSolution {
    Matrix P;   ///< solution of P R P + ½ Tr(R P) P = Q
    double s;   ///< root of scalar_h, equals Tr(R P)
    Vector r;   ///< eigenvalues of Q^{1/2} R Q^{1/2}
};

inline double riccati_like_residual(const Matrix& p, const Matrix& q, const Matrix& r) {
    return (p * r * p + 0.5 * (r * p).trace() * p - q).norm();
}

/// Solves P R P + ½ Tr(R P) P = Q for SPD Q, R through the scalar reduction:
/// with Q^{1/2} R Q^{1/2} = U diag(r) Uᵀ, P = Q^{1/2} U diag(p) Uᵀ Q^{1/2} and
/// p_i = 4 / (s + √(s² + 16 r_i)), s the root of scalar_h.
inline RiccatiLikeSolution solve_riccati_like(const Matrix& q, const Matrix& r) {
    if (!is_square(q) || !is_square(r) || q.rows() != r.rows()) {
        throw DimensionError("solve_riccati_like: Q and R must be n x n");
    }
    if (!is_positive_definite(q)) {
        throw NotPositiveDefinite("solve_riccati_like: Q is not positive definite");
    }
    if (!is_positive_definite(r)) {
        throw NotPositiveDefinite("solve_riccati_like: R is not positive definite");
    }
    const Matrix q_half = symmetric_sqrt(q);
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(q_half * r * q_half));
    const Vector rr = es.eigenvalues();
    const Matrix& u = es.eigenvectors();

    const double s = solve_scalar_h(rr);
    // Rationalized form of −s/(4r) + √(s²/(16r²) + 1/r); no cancellation.
    const Vector p = 4.0 / (s + (s * s + 16.0 * rr.array()).sqrt());

    RiccatiLikeSolution sol{symmetrize(q_half * u * p.asDiagonal() * u.transpose() * q_half), s, rr};
    return sol;
}

} // namespace evtrig::integrator
