#pragma once

#include <complex>
#include <string>
#include <vector>

#include "evtrig/linalg.hpp"

namespace evtrig::lqg {

/// Continuous-time LTI plant
///   ẋ = A x + B_w w + B_u u
///   z = C_z x + D_zu u
///   y = C_y x + D_yw w
/// driven by unit-intensity white noise w.
struct PlantModel {
    Matrix A;
    Matrix B_w;
    Matrix B_u;
    Matrix C_z;
    Matrix D_zu;
    Matrix C_y;
    Matrix D_yw;

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index noise_inputs() const { return B_w.cols(); }
    Eigen::Index control_inputs() const { return B_u.cols(); }
    Eigen::Index performance_outputs() const { return C_z.rows(); }
    Eigen::Index measurements() const { return C_y.rows(); }
};

namespace detail {

// Rank of a complex matrix by SVD with a relative floor.
inline Eigen::Index numerical_rank(const ComplexMatrix& m) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double floor = 1e-10 * std::max(1.0, sv(0));
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > floor) {
            ++rank;
        }
    }
    return rank;
}

// Hautus test at every eigenvalue of `a` in the closed right half-plane.
// `stacked_right` selects [A-λI, B] (stabilizability) versus [A-λI; C].
inline bool hautus_holds(const Matrix& a, const Matrix& other, bool stacked_right) {
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return true;
    }
    Eigen::EigenSolver<Matrix> es(a, false);
    const double margin = 1e-9 * (1.0 + spectral_radius(a));
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::complex<double> lambda = es.eigenvalues()(k);
        if (lambda.real() < -margin) {
            continue;
        }
        ComplexMatrix shifted = a.cast<std::complex<double>>();
        shifted.diagonal().array() -= lambda;
        ComplexMatrix test;
        if (stacked_right) {
            test.resize(n, n + other.cols());
            test << shifted, other.cast<std::complex<double>>();
        } else {
            test.resize(n + other.rows(), n);
            test << shifted, other.cast<std::complex<double>>();
        }
        if (numerical_rank(test) < n) {
            return false;
        }
    }
    return true;
}

inline bool invertible_gram(const Matrix& g) {
    if (g.size() == 0) {
        return false;
    }
    const Vector ev = symmetric_eigenvalues(g);
    return ev.maxCoeff() > 0.0 && ev.minCoeff() > 1e-12 * ev.maxCoeff();
}

} // namespace detail

/// Checks dimensions and the standard output-feedback H2 assumptions.
/// Returns one tag per violated assumption; an empty list means valid.
inline std::vector<std::string> validate_plant(const PlantModel& p) {
    std::vector<std::string> violations;
    const Eigen::Index n = p.A.rows();

    auto check = [&](bool ok, std::string tag) {
        if (!ok) {
            violations.push_back(std::move(tag));
        }
    };
    check(n > 0 && p.A.cols() == n, "dimension mismatch: A must be square and nonempty");
    check(p.B_w.rows() == n, "dimension mismatch: B_w rows != n");
    check(p.B_u.rows() == n, "dimension mismatch: B_u rows != n");
    check(p.C_z.cols() == n, "dimension mismatch: C_z cols != n");
    check(p.C_y.cols() == n, "dimension mismatch: C_y cols != n");
    check(p.D_zu.rows() == p.C_z.rows() && p.D_zu.cols() == p.B_u.cols(),
          "dimension mismatch: D_zu must be p_z x m_u");
    check(p.D_yw.rows() == p.C_y.rows() && p.D_yw.cols() == p.B_w.cols(),
          "dimension mismatch: D_yw must be p_y x m_w");
    if (!violations.empty()) {
        return violations;
    }

    check(detail::invertible_gram(p.D_zu.transpose() * p.D_zu), "D_zuᵀD_zu singular");
    check(detail::invertible_gram(p.D_yw * p.D_yw.transpose()), "D_ywD_ywᵀ singular");
    check(detail::hautus_holds(p.A, p.B_u, true), "(A,B_u) not stabilizable");
    check(detail::hautus_holds(p.A, p.C_y, false), "(C_y,A) not detectable");
    return violations;
}

} // namespace evtrig::lqg
