#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "evtrig/stefan/grid.hpp"

namespace evtrig::stefan {

using Point2 = Eigen::Vector2d;

/// Closed contour of ∂Ω, counterclockwise, first point repeated at the end.
struct BoundaryPolyline {
    std::vector<Point2> points;
};

/// Signed field whose zero level approximates ∂Ω.
///
/// V vanishes quadratically at the free boundary (value and gradient are both
/// zero there), so √(−V) vanishes linearly and can be interpolated. On Ω the
/// field is √(−V). On a node just outside Ω it is the largest linear
/// extrapolation of √(−V) from its in-Ω axis neighbours, forced slightly
/// negative; when no inward slope is available it mirrors the neighbour
/// value. Nodes further out get −max √(−V).
inline Vector level_field(const ValueFunctionGrid& grid) {
    const GridSpec& spec = grid.spec;
    const int n0 = spec.n_cells[0];
    const int n1 = spec.n_cells[1];
    const Eigen::Index nn = static_cast<Eigen::Index>(spec.node_count());
    Vector phi = Vector::Zero(nn);
    double phi_max = 0.0;
    for (Eigen::Index k = 0; k < nn; ++k) {
        if (grid.omega[static_cast<std::size_t>(k)]) {
            phi(k) = std::sqrt(-grid.V(k));
            phi_max = std::max(phi_max, phi(k));
        }
    }
    const double far = phi_max > 0.0 ? -phi_max : -1.0;
    Vector psi(nn);
    constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    auto inside = [&](int i, int j) { return i >= 0 && j >= 0 && i <= n0 && j <= n1 && grid.in_omega(i, j); };

    for (int j = 0; j <= n1; ++j) {
        for (int i = 0; i <= n0; ++i) {
            const auto k = static_cast<Eigen::Index>(spec.index(i, j));
            if (grid.in_omega(i, j)) {
                psi(k) = phi(k);
                continue;
            }
            bool found = false;
            double best = 0.0;
            for (const auto& d : dirs) {
                const int ai = i + d[0];
                const int aj = j + d[1];
                if (!inside(ai, aj)) {
                    continue;
                }
                const double pa = phi(static_cast<Eigen::Index>(spec.index(ai, aj)));
                double est = -pa;
                const int bi = ai + d[0];
                const int bj = aj + d[1];
                if (inside(bi, bj)) {
                    const double pb = phi(static_cast<Eigen::Index>(spec.index(bi, bj)));
                    if (pb > pa) {
                        est = std::min(2.0 * pa - pb, -1e-3 * pa);
                    }
                }
                best = found ? std::max(best, est) : est;
                found = true;
            }
            psi(k) = found ? best : far;
        }
    }
    return psi;
}

namespace detail {

inline const Vector& level_of(const ValueFunctionGrid& grid, Vector& storage) {
    if (grid.level.size() == static_cast<Eigen::Index>(grid.spec.node_count())) {
        return grid.level;
    }
    storage = level_field(grid);
    return storage;
}

inline double shoelace(const std::vector<Point2>& pts) {
    double a = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point2& p = pts[k];
        const Point2& q = pts[(k + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

} // namespace detail

/// Signed area of a closed polygon (a repeated closing point is harmless).
inline double polygon_area(const std::vector<Point2>& pts) {
    return detail::shoelace(pts);
}

/// Convex hull, counterclockwise, without a repeated closing point.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// (hull area − area) / area. Zero for a convex polygon.
inline double convexity_defect(const BoundaryPolyline& poly) {
    const double area = std::abs(polygon_area(poly.points));
    if (area == 0.0) {
        return 0.0;
    }
    return (std::abs(polygon_area(convex_hull(poly.points))) - area) / area;
}

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

/// Distance from p to the polyline through `pts` (segments between consecutive points).
inline double distance_to_polyline(const Point2& p, const std::vector<Point2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        best = std::min(best, point_segment_distance(p, pts[k], pts[k + 1]));
    }
    if (pts.size() == 1) {
        best = (p - pts.front()).norm();
    }
    return best;
}

/// Symmetric Hausdorff distance between two polylines, vertex to segment.
inline double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
    double d = 0.0;
    for (const auto& p : a) {
        d = std::max(d, distance_to_polyline(p, b));
    }
    for (const auto& p : b) {
        d = std::max(d, distance_to_polyline(p, a));
    }
    return d;
}

/// Marching-squares contour of ∂Ω on the level field. Saddle cells are
/// resolved with the cell-centre average. When Ω has several components the
/// loop enclosing the largest area is returned.
inline BoundaryPolyline extract_boundary(const ValueFunctionGrid& grid) {
    if (grid.omega_count() == 0) {
        throw EmptyOmega("extract_boundary: continuation region is empty");
    }
    if (grid.touches_edge()) {
        throw OmegaTouchesBoundary("extract_boundary: continuation region reaches the grid edge");
    }
    const GridSpec& spec = grid.spec;
    Vector storage;
    const Vector& psi = detail::level_of(grid, storage);
    const int n0 = spec.n_cells[0];
    const int n1 = spec.n_cells[1];
    const long nx = n0 + 1;

    auto val = [&](int i, int j) { return psi(static_cast<Eigen::Index>(spec.index(i, j))); };
    // Horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1).
    auto hid = [&](int i, int j) { return 2 * (static_cast<long>(j) * nx + i); };
    auto vid = [&](int i, int j) { return 2 * (static_cast<long>(j) * nx + i) + 1; };

    std::unordered_map<long, Point2> where;
    std::unordered_map<long, std::array<long, 2>> links;
    auto crossing = [&](long id, int i, int j, int ii, int jj) {
        if (where.count(id) == 0) {
            const double a = val(i, j);
            const double b = val(ii, jj);
            const double t = a / (a - b);
            const Point2 pa(spec.coord(0, i), spec.coord(1, j));
            const Point2 pb(spec.coord(0, ii), spec.coord(1, jj));
            where.emplace(id, pa + t * (pb - pa));
        }
        return id;
    };
    auto link = [&](long a, long b) {
        for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
            auto it = links.find(from);
            if (it == links.end()) {
                links.emplace(from, std::array<long, 2>{to, -1});
            } else {
                it->second[1] = to;
            }
        }
    };

    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const double c0 = val(i, j);
            const double c1 = val(i + 1, j);
            const double c2 = val(i + 1, j + 1);
            const double c3 = val(i, j + 1);
            const bool s0 = c0 > 0.0;
            const bool s1 = c1 > 0.0;
            const bool s2 = c2 > 0.0;
            const bool s3 = c3 > 0.0;
            std::array<long, 4> e{-1, -1, -1, -1};
            if (s0 != s1) e[0] = crossing(hid(i, j), i, j, i + 1, j);
            if (s1 != s2) e[1] = crossing(vid(i + 1, j), i + 1, j, i + 1, j + 1);
            if (s2 != s3) e[2] = crossing(hid(i, j + 1), i, j + 1, i + 1, j + 1);
            if (s3 != s0) e[3] = crossing(vid(i, j), i, j, i, j + 1);

            const int count = (e[0] >= 0) + (e[1] >= 0) + (e[2] >= 0) + (e[3] >= 0);
            if (count == 2) {
                long first = -1;
                for (long id : e) {
                    if (id >= 0) {
                        if (first < 0) {
                            first = id;
                        } else {
                            link(first, id);
                        }
                    }
                }
            } else if (count == 4) {
                const bool centre_in = 0.25 * (c0 + c1 + c2 + c3) > 0.0;
                // Pairs (e0,e1) and (e2,e3) cut off corners 1 and 3;
                // pairs (e3,e0) and (e1,e2) cut off corners 0 and 2.
                const bool cut_13 = s0 ? centre_in : !centre_in;
                if (cut_13) {
                    link(e[0], e[1]);
                    link(e[2], e[3]);
                } else {
                    link(e[3], e[0]);
                    link(e[1], e[2]);
                }
            }
        }
    }

    std::unordered_map<long, bool> used;
    std::vector<Point2> best;
    double best_area = -1.0;
    for (const auto& [start, _] : links) {
        if (used[start]) {
            continue;
        }
        std::vector<Point2> loop;
        long prev = -1;
        long cur = start;
        while (cur >= 0 && !used[cur]) {
            used[cur] = true;
            loop.push_back(where.at(cur));
            const auto& nb = links.at(cur);
            const long next = nb[0] != prev ? nb[0] : nb[1];
            prev = cur;
            cur = next;
        }
        const double area = std::abs(detail::shoelace(loop));
        if (area > best_area) {
            best_area = area;
            best = std::move(loop);
        }
    }
    if (detail::shoelace(best) < 0.0) {
        std::reverse(best.begin(), best.end());
    }
    best.push_back(best.front());
    return BoundaryPolyline{std::move(best)};
}

/// Bilinear interpolation of the level field at x. Returns false when x is
/// outside the grid domain; `scale` receives the sum of the corner magnitudes.
inline bool interpolate_level(const Point2& x, const GridSpec& spec, const Vector& psi, double& value,
                              double& scale) {
    const double u = (x.x() + spec.half_width[0]) / spec.spacing(0);
    const double v = (x.y() + spec.half_width[1]) / spec.spacing(1);
    if (!(u >= 0.0 && v >= 0.0 && u <= spec.n_cells[0] && v <= spec.n_cells[1])) {
        return false;
    }
    const int i = std::min(static_cast<int>(u), spec.n_cells[0] - 1);
    const int j = std::min(static_cast<int>(v), spec.n_cells[1] - 1);
    const double s = u - i;
    const double t = v - j;
    const Eigen::Index k = static_cast<Eigen::Index>(spec.index(i, j));
    const Eigen::Index up = spec.nodes(0);
    const double c00 = psi(k);
    const double c10 = psi(k + 1);
    const double c01 = psi(k + up);
    const double c11 = psi(k + up + 1);
    value = (1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11;
    scale = std::abs(c00) + std::abs(c10) + std::abs(c01) + std::abs(c11);
    return true;
}

/// Fires when x has left Ω: the interpolated level field is (numerically) at
/// or below zero, or x is outside the grid domain.
inline bool grid_trigger(const Point2& x, const ValueFunctionGrid& grid) {
    Vector storage;
    const Vector& psi = detail::level_of(grid, storage);
    double value = 0.0;
    double scale = 0.0;
    if (!interpolate_level(x, grid.spec, psi, value, scale)) {
        return true;
    }
    return value <= 1e-12 * scale;
}

} // namespace evtrig::stefan
