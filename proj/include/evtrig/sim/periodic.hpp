#pragma once

#include <array>
#include <cmath>

#include "evtrig/lqg/design.hpp"

namespace evtrig::sim {

/// Stationary degradation cost of sampling every h time units:
///   J_H(h) = (1/h) ∫₀ʰ (h − σ) Tr(e^{Aᵀσ} Q e^{Aσ} R) dσ,
/// the double integral over the sampling interval collapsed onto σ.
///
/// Evaluated with one block exponential: for
///   C = [[−Aᵀ, I, 0], [0, −Aᵀ, Q], [0, 0, A]],
/// the blocks of e^{Ch} satisfy F₃ᵀ K₁ = ∫₀ʰ (h − σ) e^{Aᵀσ} Q e^{Aσ} dσ,
/// where F₃ = e^{Ah} is the lower-right block and K₁ the upper-right block.
inline double periodic_cost(const lqg::ResetSystem& sys, double h) {
    if (!(h > 0.0)) {
        throw DomainError("periodic_cost: h must be positive");
    }
    const Eigen::Index n = sys.states();
    Matrix c = Matrix::Zero(3 * n, 3 * n);
    c.block(0, 0, n, n) = -sys.A.transpose();
    c.block(0, n, n, n).setIdentity();
    c.block(n, n, n, n) = -sys.A.transpose();
    c.block(n, 2 * n, n, n) = sys.Q;
    c.block(2 * n, 2 * n, n, n) = sys.A;
    const Matrix e = expm(h * c);
    const Matrix f3 = e.block(2 * n, 2 * n, n, n);
    const Matrix k1 = e.block(0, 2 * n, n, n);
    return (f3.transpose() * k1 * sys.R).trace() / h;
}

inline double periodic_cost(const lqg::PlantModel& plant, const lqg::LqgDesign& design, double h) {
    return periodic_cost(lqg::build_reset_system(plant, design), h);
}

/// The same quantity by composite 8-point Gauss–Legendre quadrature, with the
/// panel count doubled until two passes agree to `rel_tol`.
inline double periodic_cost_quadrature(const lqg::ResetSystem& sys, double h, double rel_tol = 1e-10) {
    if (!(h > 0.0)) {
        throw DomainError("periodic_cost_quadrature: h must be positive");
    }
    static constexpr std::array<double, 8> node{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> weight{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                  0.2223810344533745, 0.1012285362903763};
    auto integrand = [&](double s) {
        const Matrix phi = expm(s * sys.A);
        return (h - s) * (phi.transpose() * sys.Q * phi * sys.R).trace();
    };
    auto pass = [&](int panels) {
        const double width = h / panels;
        double total = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * width;
            for (std::size_t k = 0; k < node.size(); ++k) {
                total += weight[k] * integrand(mid + 0.5 * width * node[k]);
            }
        }
        return 0.5 * width * total / h;
    };
    double previous = pass(1);
    for (int panels = 2; panels <= 4096; panels *= 2) {
        const double current = pass(panels);
        if (std::abs(current - previous) <= rel_tol * std::abs(current)) {
            return current;
        }
        previous = current;
    }
    return previous;
}

} // namespace evtrig::sim
