#pragma once

#include <string>

#include "evtrig/lqg/care.hpp"
#include "evtrig/lqg/plant.hpp"

namespace evtrig::lqg {

/// Continuous-time LQG design: Riccati solutions, gains and the minimum cost.
struct LqgDesign {
    Matrix X; ///< control Riccati solution
    Matrix Y; ///< filter Riccati solution
    Matrix F; ///< state feedback, u = F x̂
    Matrix L; ///< filter gain
    double gamma0 = 0.0;
};

/// Reset system ẋ = A x + ε with x(t_i) = 0, state cost Q and noise intensity R.
struct ResetSystem {
    Matrix A;
    Matrix Q;
    Matrix R;

    Eigen::Index states() const { return A.rows(); }
};

/// Residuals of the two design Riccati equations in their original form.
struct RiccatiResiduals {
    double control = 0.0;
    double filter = 0.0;
};

inline RiccatiResiduals design_residuals(const PlantModel& p, const LqgDesign& d) {
    const Matrix ru = p.D_zu.transpose() * p.D_zu;
    const Matrix rw = p.D_yw * p.D_yw.transpose();
    RiccatiResiduals r;
    r.control = (p.A.transpose() * d.X + d.X * p.A + p.C_z.transpose() * p.C_z -
                 d.F.transpose() * ru * d.F)
                    .norm();
    r.filter = (p.A * d.Y + d.Y * p.A.transpose() + p.B_w * p.B_w.transpose() -
                d.L * rw * d.L.transpose())
                   .norm();
    return r;
}

/// Solves the control and filter Riccati equations (cross terms handled by
/// completing the square) and evaluates the minimum continuous-time cost
///   γ₀ = Tr(B_wᵀ X B_w) + Tr(C_z Y C_zᵀ) + Tr(X A Y + Y Aᵀ X).
/// The plant is assumed to have passed validate_plant.
inline LqgDesign design_lqg(const PlantModel& p) {
    const Matrix ru = p.D_zu.transpose() * p.D_zu;
    const Matrix rw = p.D_yw * p.D_yw.transpose();
    const Eigen::LDLT<Matrix> ru_inv(ru);
    const Eigen::LDLT<Matrix> rw_inv(rw);

    // Control equation: Ã = A − B_u Ru⁻¹ D_zuᵀ C_z.
    const Matrix a_ctrl = p.A - p.B_u * ru_inv.solve(p.D_zu.transpose() * p.C_z);
    const Matrix s_ctrl = p.B_u * ru_inv.solve(p.B_u.transpose());
    const Matrix proj_z = Matrix::Identity(p.D_zu.rows(), p.D_zu.rows()) -
                          p.D_zu * ru_inv.solve(p.D_zu.transpose());
    const Matrix q_ctrl = p.C_z.transpose() * proj_z * p.C_z;

    // Filter equation, solved as the dual CARE with Â = A − B_w D_ywᵀ Rw⁻¹ C_y.
    const Matrix a_filt = p.A - p.B_w * p.D_yw.transpose() * rw_inv.solve(p.C_y);
    const Matrix s_filt = p.C_y.transpose() * rw_inv.solve(p.C_y);
    const Matrix proj_w = Matrix::Identity(p.D_yw.cols(), p.D_yw.cols()) -
                          p.D_yw.transpose() * rw_inv.solve(p.D_yw);
    const Matrix q_filt = p.B_w * proj_w * p.B_w.transpose();

    LqgDesign d;
    d.X = solve_care(a_ctrl, s_ctrl, q_ctrl);
    d.Y = solve_care(a_filt.transpose(), s_filt, q_filt);
    d.F = -ru_inv.solve(p.B_u.transpose() * d.X + p.D_zu.transpose() * p.C_z);
    d.L = -rw_inv.solve(p.C_y * d.Y + p.D_yw * p.B_w.transpose()).transpose();
    d.gamma0 = (p.B_w.transpose() * d.X * p.B_w).trace() + (p.C_z * d.Y * p.C_z.transpose()).trace() +
               (d.X * p.A * d.Y + d.Y * p.A.transpose() * d.X).trace();
    return d;
}

/// Builds the reset system that carries the sampling-induced degradation:
/// Q = Fᵀ (D_zuᵀ D_zu) F and R = L (D_yw D_ywᵀ) Lᵀ.
inline ResetSystem build_reset_system(const PlantModel& p, const LqgDesign& d) {
    ResetSystem sys;
    sys.A = p.A;
    sys.Q = symmetrize(d.F.transpose() * (p.D_zu.transpose() * p.D_zu) * d.F);
    sys.R = symmetrize(d.L * (p.D_yw * p.D_yw.transpose()) * d.L.transpose());
    return sys;
}

/// Stationary cost Tr(Q Σ) of the reset system without resets, where
/// A Σ + Σ Aᵀ + R = 0. Only defined for Hurwitz A.
inline double h2_cost_lyapunov(const ResetSystem& sys) {
    if (!is_hurwitz(sys.A)) {
        throw NotHurwitz("h2_cost_lyapunov: A is not Hurwitz");
    }
    const Matrix sigma = solve_lyapunov(sys.A, sys.R);
    return (sys.Q * sigma).trace();
}

} // namespace evtrig::lqg
