#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "evtrig/stefan/grid.hpp"

namespace evtrig::stefan {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete generator L[V] = (A x)·∇V + ½ Σ R_kl ∂²V/∂x_k∂x_l on interior
/// nodes. Rows belonging to edge nodes are empty, so I − dt L reduces to the
/// identity there and the far-field condition V = 0 is kept exactly.
/// Every diagonal entry is stored (possibly as zero) to keep the sparsity
/// pattern independent of later diagonal modifications.
inline SparseMatrix assemble_operator(const lqg::ResetSystem& sys, const GridSpec& spec) {
    if (sys.A.rows() != 2 || sys.A.cols() != 2 || sys.R.rows() != 2 || sys.R.cols() != 2) {
        throw DimensionError("assemble_operator: the grid solver supports n = 2 only");
    }
    validate_grid_spec(spec);
    const int n0 = spec.n_cells[0];
    const int n1 = spec.n_cells[1];
    const double h0 = spec.spacing(0);
    const double h1 = spec.spacing(1);
    const double r00 = sys.R(0, 0);
    const double r11 = sys.R(1, 1);
    const double r01 = 0.5 * (sys.R(0, 1) + sys.R(1, 0));
    const bool hybrid = spec.convection == ConvectionScheme::Hybrid;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(spec.node_count() * 9);
    auto add = [&](int i, int j, int ii, int jj, double v) {
        trip.emplace_back(static_cast<int>(spec.index(i, j)), static_cast<int>(spec.index(ii, jj)), v);
    };

    for (int j = 0; j <= n1; ++j) {
        for (int i = 0; i <= n0; ++i) {
            if (spec.is_edge(i, j)) {
                add(i, j, i, j, 0.0);
                continue;
            }
            const double x0 = spec.coord(0, i);
            const double x1 = spec.coord(1, j);
            const double a0 = sys.A(0, 0) * x0 + sys.A(0, 1) * x1;
            const double a1 = sys.A(1, 0) * x0 + sys.A(1, 1) * x1;

            double diag = -r00 / (h0 * h0) - r11 / (h1 * h1);
            double e = 0.5 * r00 / (h0 * h0);
            double w = e;
            double nn = 0.5 * r11 / (h1 * h1);
            double s = nn;

            if (hybrid && std::abs(a0) * h0 > r00) {
                if (a0 > 0.0) {
                    e += a0 / h0;
                    diag -= a0 / h0;
                } else {
                    w -= a0 / h0;
                    diag += a0 / h0;
                }
            } else {
                e += 0.5 * a0 / h0;
                w -= 0.5 * a0 / h0;
            }
            if (hybrid && std::abs(a1) * h1 > r11) {
                if (a1 > 0.0) {
                    nn += a1 / h1;
                    diag -= a1 / h1;
                } else {
                    s -= a1 / h1;
                    diag += a1 / h1;
                }
            } else {
                nn += 0.5 * a1 / h1;
                s -= 0.5 * a1 / h1;
            }

            add(i, j, i, j, diag);
            add(i, j, i + 1, j, e);
            add(i, j, i - 1, j, w);
            add(i, j, i, j + 1, nn);
            add(i, j, i, j - 1, s);
            if (r01 != 0.0) {
                const double c = r01 / (4.0 * h0 * h1);
                add(i, j, i + 1, j + 1, c);
                add(i, j, i - 1, j - 1, c);
                add(i, j, i + 1, j - 1, -c);
                add(i, j, i - 1, j + 1, -c);
            }
        }
    }
    SparseMatrix l(static_cast<Eigen::Index>(spec.node_count()), static_cast<Eigen::Index>(spec.node_count()));
    l.setFromTriplets(trip.begin(), trip.end());
    l.makeCompressed();
    return l;
}

/// I − dt L.
inline SparseMatrix step_matrix(const SparseMatrix& l, double dt) {
    SparseMatrix id(l.rows(), l.cols());
    id.setIdentity();
    SparseMatrix m = id - dt * l;
    m.makeCompressed();
    return m;
}

/// Running cost of the stopping problem, xᵀ Q x − J, on interior nodes (0 on edges).
inline Vector source_term(const lqg::ResetSystem& sys, const GridSpec& spec, double J) {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(spec.node_count()));
    for (int j = 1; j < spec.n_cells[1]; ++j) {
        for (int i = 1; i < spec.n_cells[0]; ++i) {
            const Eigen::Vector2d x(spec.coord(0, i), spec.coord(1, j));
            f(static_cast<Eigen::Index>(spec.index(i, j))) = x.dot(sys.Q * x) - J;
        }
    }
    return f;
}

} // namespace evtrig::stefan
