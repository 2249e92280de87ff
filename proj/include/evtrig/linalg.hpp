#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "evtrig/errors.hpp"

namespace evtrig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

inline Vector symmetric_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Symmetric square root via eigendecomposition. Negative eigenvalues of
/// magnitude at rounding level are clipped to zero.
inline Matrix symmetric_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

/// Largest real part among the eigenvalues of `a`.
inline double spectral_abscissa(const Matrix& a) {
    if (a.size() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    Eigen::EigenSolver<Matrix> es(a, false);
    return es.eigenvalues().real().maxCoeff();
}

inline double spectral_radius(const Matrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Matrix> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Hurwitz test with a scale-aware margin: max Re(λ) < -1e-9 (1 + spectral radius).
inline bool is_hurwitz(const Matrix& a) {
    if (a.size() == 0) {
        return true;
    }
    Eigen::EigenSolver<Matrix> es(a, false);
    const auto ev = es.eigenvalues();
    const double radius = ev.cwiseAbs().maxCoeff();
    return ev.real().maxCoeff() < -1e-9 * (1.0 + radius);
}

/// Positive definiteness in the sense used throughout the library: Cholesky
/// succeeds and the eigenvalue spread stays below 1e12.
inline bool is_positive_definite(const Matrix& m, double rel_floor = 1e-12) {
    if (!is_square(m) || m.size() == 0) {
        return false;
    }
    Eigen::LLT<Matrix> llt(symmetrize(m));
    if (llt.info() != Eigen::Success) {
        return false;
    }
    const Vector ev = symmetric_eigenvalues(m);
    return ev.minCoeff() > rel_floor * ev.maxCoeff();
}

/// Solves A X + X Aᵀ + C = 0 by complex Schur (Bartels–Stewart).
/// Requires λ_i(A) + conj(λ_j(A)) ≠ 0 for all pairs.
inline Matrix solve_lyapunov(const Matrix& a, const Matrix& c) {
    if (!is_square(a) || a.rows() != c.rows() || !is_square(c)) {
        throw DimensionError("solve_lyapunov: dimension mismatch");
    }
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return Matrix(0, 0);
    }
    Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<std::complex<double>>());
    const ComplexMatrix& t = schur.matrixT();
    const ComplexMatrix& u = schur.matrixU();
    const ComplexMatrix ct = u.adjoint() * c.cast<std::complex<double>>() * u;

    // T Y + Y Tᴴ = -Ct, solved column by column from the last one.
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    const double scale = 1.0 + t.cwiseAbs().maxCoeff();
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = -ct.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) {
            rhs -= std::conj(t(j, k)) * y.col(k);
        }
        ComplexMatrix shifted = t;
        shifted.diagonal().array() += std::conj(t(j, j));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(shifted(i, i)) <= 1e-14 * scale) {
                throw NotHurwitz("solve_lyapunov: singular Sylvester operator");
            }
        }
        y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    return symmetrize((u * y * u.adjoint()).real());
}

inline double lyapunov_residual(const Matrix& a, const Matrix& x, const Matrix& c) {
    return (a * x + x * a.transpose() + c).norm();
}

inline Matrix expm(const Matrix& m) { return m.exp(); }

} // namespace evtrig
