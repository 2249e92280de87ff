#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evtrig/lqg/design.hpp"
#include "evtrig/sim/trigger.hpp"

namespace evtrig::sim {

struct SimConfig {
    double h_nom = 1e-3;
    double T = 2000.0;
    std::uint64_t seed = 1;
    int n_reps = 20;
};

/// One point of a cost/rate trade-off curve.
struct TradeoffPoint {
    double h_avg = 0.0;   ///< 1 / f
    double J_H_hat = 0.0; ///< degradation cost above γ₀
    double J_z_hat = 0.0; ///< γ₀ + J_H_hat
    double std_error = 0.0; ///< standard error of J_H_hat across replications
    long n_samples = 0;   ///< resets counted after burn-in, all replications
    double f_hat = 0.0;   ///< average sampling rate
    std::string scheme;
    double param = 0.0;   ///< h, ρ or J depending on the scheme
};

/// splitmix64 finalizer, used to derive independent replication seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t replication_seed(std::uint64_t master, int rep) {
    return splitmix64(master + static_cast<std::uint64_t>(rep));
}

inline void validate_sim_config(const SimConfig& cfg, const TriggerScheme& trig) {
    if (!(cfg.h_nom > 0.0) || !(cfg.T > 0.0) || cfg.n_reps < 1) {
        throw DomainError("SimConfig: h_nom, T and n_reps must be positive");
    }
    if (cfg.T / cfg.h_nom < 1e4 * (1.0 - 1e-12)) {
        throw DomainError("SimConfig: T / h_nom must be at least 1e4");
    }
    if (const auto* p = std::get_if<Periodic>(&trig)) {
        if (cfg.h_nom > p->h / 10.0 * (1.0 + 1e-12)) {
            throw DomainError("SimConfig: h_nom must not exceed h / 10 for periodic sampling");
        }
    }
}

/// Optional decimated record of the first replication.
struct TraceRow {
    double t;
    Vector x;
    bool sampled;
};

namespace detail {

// Evaluates a trigger without allocating; one instance per replication.
class TriggerEval {
public:
    TriggerEval(const TriggerScheme& trig, double h_nom, Eigen::Index n) : trig_(trig), px_(n) {
        if (const auto* p = std::get_if<Periodic>(&trig)) {
            period_steps_ = std::max<long>(1, static_cast<long>(std::ceil(p->h / h_nom - 1e-9)));
        }
        if (const auto* g = std::get_if<GridBoundary>(&trig)) {
            grid_ = g->grid.get();
            if (grid_->level.size() == static_cast<Eigen::Index>(grid_->spec.node_count())) {
                level_ = &grid_->level;
            } else {
                own_level_ = stefan::level_field(*grid_);
                level_ = &own_level_;
            }
        }
    }

    bool fires(const Vector& x, long step) {
        switch (trig_.index()) {
        case 0:
            return (step + 1) % period_steps_ == 0;
        case 1: {
            const auto& e = std::get<Ellipsoid>(trig_);
            px_.noalias() = e.bound.P * x;
            return x.dot(px_) >= e.bound.level();
        }
        default: {
            double value = 0.0;
            double scale = 0.0;
            if (!stefan::interpolate_level(stefan::Point2(x(0), x(1)), grid_->spec, *level_, value, scale)) {
                return true;
            }
            return value <= 1e-12 * scale;
        }
        }
    }

private:
    const TriggerScheme& trig_;
    Vector px_;
    long period_steps_ = 1;
    const stefan::ValueFunctionGrid* grid_ = nullptr;
    const Vector* level_ = nullptr;
    Vector own_level_;
};

struct ReplicationResult {
    double J_H = 0.0;
    double f = 0.0;
    long count = 0;
};

inline ReplicationResult run_replication(const lqg::ResetSystem& sys, const Matrix& r_half, const TriggerScheme& trig,
                                         const SimConfig& cfg, int rep, std::vector<TraceRow>* trace,
                                         long trace_every) {
    const Eigen::Index n = sys.states();
    const long steps = std::llround(cfg.T / cfg.h_nom);
    const long burn = steps / 100;
    const double sqrt_h = std::sqrt(cfg.h_nom);

    std::mt19937_64 gen(replication_seed(cfg.seed, rep));
    std::normal_distribution<double> normal(0.0, 1.0);
    TriggerEval trigger(trig, cfg.h_nom, n);

    Vector x = Vector::Zero(n);
    Vector drift(n);
    Vector qx(n);
    Vector xi(n);
    Vector noise(n);
    double cost = 0.0;
    long count = 0;
    for (long k = 0; k < steps; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            xi(i) = normal(gen);
        }
        drift.noalias() = sys.A * x;
        x += cfg.h_nom * drift;
        noise.noalias() = r_half * xi;
        x += sqrt_h * noise;
        const double sq = x.squaredNorm();
        if (!std::isfinite(sq) || sq > 1e300) {
            throw NonFiniteState("simulate: state diverged at t = " + std::to_string((k + 1) * cfg.h_nom));
        }
        if (k >= burn) {
            qx.noalias() = sys.Q * x;
            cost += x.dot(qx) * cfg.h_nom;
        }
        const bool fire = trigger.fires(x, k);
        if (trace != nullptr && trace_every > 0 && k % trace_every == 0) {
            trace->push_back(TraceRow{(k + 1) * cfg.h_nom, x, fire});
        }
        if (fire) {
            x.setZero();
            if (k >= burn) {
                ++count;
            }
        }
    }
    const double horizon = static_cast<double>(steps - burn) * cfg.h_nom;
    return ReplicationResult{cost / horizon, static_cast<double>(count) / horizon, count};
}

inline Matrix noise_factor(const Matrix& r) {
    return symmetric_sqrt(symmetrize(r));
}

} // namespace detail

/// Monte Carlo estimate of (J_H, f) for a trigger on the reset system.
///
/// Euler–Maruyama with x_{k+1} = x_k + h A x_k + √h R^{1/2} ξ_k. After each
/// state update the cost is accumulated and the trigger evaluated; a firing
/// trigger resets x to 0. The first 1% of the horizon is discarded. Each
/// replication uses its own generator seeded from (seed, replication index).
inline TradeoffPoint simulate(const lqg::ResetSystem& sys, const TriggerScheme& trig, const SimConfig& cfg,
                              double gamma0 = 0.0) {
    const Eigen::Index n = sys.states();
    if (!is_square(sys.A) || sys.Q.rows() != n || sys.Q.cols() != n || sys.R.rows() != n || sys.R.cols() != n) {
        throw DimensionError("simulate: A, Q and R must be n x n");
    }
    validate_trigger(trig, n);
    validate_sim_config(cfg, trig);
    const Matrix r_half = detail::noise_factor(sys.R);

    std::vector<double> jh(static_cast<std::size_t>(cfg.n_reps));
    double f_sum = 0.0;
    long count = 0;
    for (int rep = 0; rep < cfg.n_reps; ++rep) {
        const auto res = detail::run_replication(sys, r_half, trig, cfg, rep, nullptr, 0);
        jh[static_cast<std::size_t>(rep)] = res.J_H;
        f_sum += res.f;
        count += res.count;
    }
    double mean = 0.0;
    for (double v : jh) {
        mean += v;
    }
    mean /= cfg.n_reps;
    double var = 0.0;
    for (double v : jh) {
        var += (v - mean) * (v - mean);
    }
    TradeoffPoint pt;
    pt.J_H_hat = mean;
    pt.J_z_hat = gamma0 + mean;
    pt.std_error = cfg.n_reps > 1 ? std::sqrt(var / (cfg.n_reps - 1) / cfg.n_reps) : 0.0;
    pt.n_samples = count;
    pt.f_hat = f_sum / cfg.n_reps;
    pt.h_avg = pt.f_hat > 0.0 ? 1.0 / pt.f_hat : std::numeric_limits<double>::infinity();
    pt.scheme = scheme_name(trig);
    pt.param = scheme_parameter(trig);
    return pt;
}

/// State trajectory of the first replication, keeping every `every`-th step.
inline std::vector<TraceRow> simulate_trace(const lqg::ResetSystem& sys, const TriggerScheme& trig,
                                            const SimConfig& cfg, long every) {
    validate_trigger(trig, sys.states());
    validate_sim_config(cfg, trig);
    if (every < 1) {
        throw DomainError("simulate_trace: decimation must be positive");
    }
    std::vector<TraceRow> rows;
    detail::run_replication(sys, detail::noise_factor(sys.R), trig, cfg, 0, &rows, every);
    return rows;
}

} // namespace evtrig::sim
