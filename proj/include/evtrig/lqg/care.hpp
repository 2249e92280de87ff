#pragma once

#include <complex>
#include <utility>

#include "evtrig/linalg.hpp"

namespace evtrig::lqg {

/// Frobenius norm of Aᵀ X + X A − X S X + Qc.
inline double care_residual(const Matrix& a, const Matrix& s, const Matrix& qc, const Matrix& x) {
    return (a.transpose() * x + x * a - x * s * x + qc).norm();
}

namespace detail {

// Reorders a complex Schur form so that eigenvalues with negative real part
// lead the diagonal. Adjacent 1x1 blocks are swapped by a unitary rotation
// built from the eigenvector of the trailing entry.
inline void order_stable_first(ComplexMatrix& t, ComplexMatrix& u) {
    const Eigen::Index m = t.rows();
    for (Eigen::Index pass = 0; pass < m; ++pass) {
        bool swapped = false;
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            if (!(t(k, k).real() >= 0.0 && t(k + 1, k + 1).real() < 0.0)) {
                continue;
            }
            const std::complex<double> a = t(k, k);
            const std::complex<double> b = t(k + 1, k + 1);
            Eigen::Vector2cd v(t(k, k + 1), b - a);
            const double nv = v.norm();
            if (nv == 0.0) {
                continue;
            }
            v /= nv;
            Eigen::Matrix2cd g;
            g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));

            t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
            t.middleCols(k, 2) = t.middleCols(k, 2) * g;
            u.middleCols(k, 2) = u.middleCols(k, 2) * g;
            t(k + 1, k) = 0.0;
            t(k, k) = b;
            t(k + 1, k + 1) = a;
            swapped = true;
        }
        if (!swapped) {
            break;
        }
    }
}

} // namespace detail

/// Stabilizing solution of Aᵀ X + X A − X S X + Qc = 0.
///
/// The stable invariant subspace of the Hamiltonian [[A, −S], [−Qc, −Aᵀ]] is
/// taken from an ordered Schur decomposition; a few Kleinman–Newton steps
/// polish the result when the residual is above 1e-10 (1 + ‖X‖²).
inline Matrix solve_care(const Matrix& a, const Matrix& s, const Matrix& qc) {
    const Eigen::Index n = a.rows();
    if (!is_square(a) || s.rows() != n || s.cols() != n || qc.rows() != n || qc.cols() != n) {
        throw DimensionError("solve_care: A, S and Qc must be n x n");
    }
    if (n == 0) {
        return Matrix(0, 0);
    }
    const Matrix ss = symmetrize(s);
    const Matrix qs = symmetrize(qc);

    Matrix h(2 * n, 2 * n);
    h << a, -ss, -qs, -a.transpose();

    Eigen::ComplexSchur<ComplexMatrix> schur(h.cast<std::complex<double>>());
    if (schur.info() != Eigen::Success) {
        throw NoStabilizingSolution("solve_care: Schur decomposition did not converge");
    }
    ComplexMatrix t = schur.matrixT();
    ComplexMatrix u = schur.matrixU();

    const double hnorm = 1.0 + h.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        if (std::abs(t(i, i).real()) <= 1e-10 * hnorm) {
            throw NoStabilizingSolution("solve_care: Hamiltonian has imaginary-axis eigenvalues");
        }
    }
    detail::order_stable_first(t, u);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (t(i, i).real() >= 0.0) {
            throw NoStabilizingSolution("solve_care: stable subspace has wrong dimension");
        }
    }

    const ComplexMatrix u1 = u.topLeftCorner(n, n);
    const ComplexMatrix u2 = u.bottomLeftCorner(n, n);
    Eigen::FullPivLU<ComplexMatrix> lu(u1);
    if (!lu.isInvertible() || lu.rcond() < 1e-13) {
        throw NoStabilizingSolution("solve_care: invariant subspace basis is singular");
    }
    // X = U2 U1⁻¹, computed as (U1ᵀ \ U2ᵀ)ᵀ.
    const ComplexMatrix xc = u1.transpose().fullPivLu().solve(u2.transpose()).transpose();
    Matrix x = symmetrize(xc.real());

    auto tolerance = [&](const Matrix& xx) { return 1e-10 * (1.0 + xx.squaredNorm()); };
    for (int iter = 0; iter < 8 && care_residual(a, ss, qs, x) > tolerance(x); ++iter) {
        const Matrix closed = a - ss * x;
        if (!is_hurwitz(closed)) {
            break;
        }
        // (A − S X)ᵀ X⁺ + X⁺ (A − S X) + X S X + Qc = 0
        Matrix next = solve_lyapunov(closed.transpose(), x * ss * x + qs);
        if (care_residual(a, ss, qs, next) >= care_residual(a, ss, qs, x)) {
            break;
        }
        x = std::move(next);
    }

    if (!x.allFinite() || !is_hurwitz(a - ss * x)) {
        throw NoStabilizingSolution("solve_care: computed solution is not stabilizing");
    }
    return x;
}

} // namespace evtrig::lqg
