#pragma once

// Shared fixtures: the two example plants and random generators.

#include <cmath>
#include <numbers>
#include <random>

#include "evtrig/lqg/design.hpp"

namespace evtrig::test {

inline Matrix rotation(double t) {
    Matrix m(2, 2);
    m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return m;
}

/// Integrator plant whose reset system has Q = Nᵀ(π/4) diag(1,5) N(π/4)
/// and R = Nᵀ(π/8) diag(1,5) N(π/8).
inline lqg::PlantModel integrator_plant() {
    const Matrix rh = Eigen::Vector2d(1.0, std::sqrt(5.0)).asDiagonal();
    lqg::PlantModel p;
    p.A = Matrix::Zero(2, 2);
    p.B_w = Matrix::Zero(2, 4);
    p.B_w.leftCols(2) = (rh * rotation(std::numbers::pi / 8)).transpose();
    p.C_z = Matrix::Zero(4, 2);
    p.C_z.topRows(2) = rh * rotation(std::numbers::pi / 4);
    p.D_yw = Matrix::Zero(2, 4);
    p.D_yw.rightCols(2).setIdentity();
    p.D_zu = p.D_yw.transpose();
    p.B_u = Matrix::Identity(2, 2);
    p.C_y = Matrix::Identity(2, 2);
    return p;
}

/// Open-loop unstable plant with eigenvalues ±5.
inline lqg::PlantModel unstable_plant() {
    lqg::PlantModel p;
    p.A.resize(2, 2);
    p.A << 0, 5, 5, 0;
    p.B_w.resize(2, 4);
    p.B_w << 2.84, 0, 0, 0, -2.77, 0.65, 0, 0;
    p.C_z = p.B_w.transpose();
    p.B_u.resize(2, 2);
    p.B_u << 9, 0, 8.95, 0.95;
    p.C_y = p.B_u.transpose();
    p.D_zu = Matrix::Zero(4, 2);
    p.D_zu.bottomRows(2).setIdentity();
    p.D_yw = p.D_zu.transpose();
    return p;
}

inline Matrix random_matrix(std::mt19937_64& g, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = nd(g);
        }
    }
    return m;
}

inline Matrix random_orthogonal(std::mt19937_64& g, Eigen::Index n) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(g, n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// SPD matrix with eigenvalues log-uniform in [1, cond].
inline Matrix random_spd(std::mt19937_64& g, Eigen::Index n, double cond = 1e4) {
    std::uniform_real_distribution<double> u(0.0, std::log(cond));
    Vector ev(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ev(i) = std::exp(u(g));
    }
    const Matrix q = random_orthogonal(g, n);
    return symmetrize(q * ev.asDiagonal() * q.transpose());
}

inline Matrix random_hurwitz(std::mt19937_64& g, Eigen::Index n) {
    const Matrix m = random_matrix(g, n, n);
    const double shift = spectral_abscissa(m) + 0.5;
    return m - shift * Matrix::Identity(n, n);
}

/// Generic plant of state dimension n with cross terms D_zuᵀC_z ≠ 0 and B_w D_ywᵀ ≠ 0.
inline lqg::PlantModel random_plant(std::mt19937_64& g, Eigen::Index n) {
    std::uniform_int_distribution<int> dim(1, 3);
    const Eigen::Index mu = dim(g);
    const Eigen::Index py = dim(g);
    const Eigen::Index pz = mu + dim(g);
    const Eigen::Index mw = py + dim(g);
    lqg::PlantModel p;
    p.A = random_matrix(g, n, n);
    p.B_w = random_matrix(g, n, mw);
    p.B_u = random_matrix(g, n, mu);
    p.C_z = random_matrix(g, pz, n);
    p.D_zu = random_matrix(g, pz, mu);
    p.C_y = random_matrix(g, py, n);
    p.D_yw = random_matrix(g, py, mw);
    return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace evtrig::test
