#pragma once

#include <map>
#include <string>
#include <vector>

#include "satsw/lmi.hpp"

namespace satsw::synth {

using linalg::Matrix;
using linalg::Vector;

/// One mode of the hybrid output-feedback controller
///   xk' = A_k xk + B_k1 y + B_k2 dz(u)
///   u   = C_k1 xk + D_k11 y + D_k12 dz(u)
/// with anti-windup region matrices [H1 H2] acting on [x_p; x_k] and the
/// mode's closed-loop Lyapunov matrix P.
struct ControllerMode {
    Matrix A_k, B_k1, B_k2, C_k1, D_k11, D_k12;
    Matrix H1, H2;  // n_u x n each
    Matrix P;       // 2n x 2n symmetric positive definite
    Matrix U;       // n_u x n_u diagonal positive (deadzone scaling)
};

struct HybridController {
    std::vector<ControllerMode> modes;
    std::map<std::pair<int, int>, Matrix> resets;  // (i,j) -> Delta_ij, 1-based
    double gamma = 0.0;
    double lambda0 = 0.0;
    double mu = 0.0;
    double s = 0.0;
    double tau_a_star = 0.0;

    int numModes() const { return static_cast<int>(modes.size()); }
    const Matrix& reset(int i, int j) const;
    void checkDimensions(const SwitchedPlant& plant) const;
};

struct ClosedLoopMode {
    Matrix A_cl;    // 2n x 2n
    Matrix B_cl0;   // 2n x n_u   (deadzone input)
    Matrix B_cl2;   // 2n x n_w   (disturbance input)
    Matrix C_cl0, D_cl00, D_cl02;  // u equation
    Matrix C_cl2, D_cl20, D_cl22;  // z equation
};

struct CertificateReport {
    std::vector<double> dissipation_lambda_max;            // per mode, want < 0
    std::vector<double> p_lambda_min;                      // per mode, want > 0
    std::map<std::pair<int, int>, double> boundary_lambda_min;  // per pair, want >= -delta
    std::vector<std::vector<double>> inclusion_slack;      // [mode][channel], want >= -delta*u_bar
    bool pass = false;
    std::string summary() const;
};

/// Controller construction: balanced factorization of I - R_i S_i, controller
/// block recovery, reset maps, H recovery, and P_i = Z2 Z1^{-1}.
HybridController reconstruct(const Vector& assignment, const lmi::LmiProgram& program,
                             const SwitchedPlant& plant, const SynthesisSpec& spec,
                             double gamma);

ClosedLoopMode assembleClosedLoop(const PlantMode& plant_mode, const ControllerMode& ctrl_mode);

/// Independent closed-loop certificate check: dissipation inequality per mode,
/// boundary condition per pair, ellipsoid inclusion per channel.
CertificateReport verifyCertificate(const HybridController& ctrl, const SwitchedPlant& plant,
                                    double delta = 1e-8);

double dwellTimeBound(double lambda0, double mu);

/// Hatted synthesis variables re-derived from a reconstructed controller
/// (forward direction of the reconstruction relations) for round-trip checks.
struct HattedVars {
    Matrix Ah, Bh1, Bh2, Ch1, Dh11, Dh12, Hh1, Hh2;     // per mode
    std::map<std::pair<int, int>, Matrix> DeltaHat;      // per pair
};

std::vector<HattedVars> rederiveHatted(const HybridController& ctrl,
                                       const SwitchedPlant& plant, const Vector& assignment,
                                       const lmi::LmiProgram& program);

/// Per-mode relative residual of the proof's congruence identity:
/// diag(Z1,U,I,I)^T (dissipation) diag(Z1,U,I,I) vs the evaluated Perf block.
std::vector<double> congruenceResidual(const HybridController& ctrl,
                                       const SwitchedPlant& plant,
                                       const lmi::LmiProgram& program,
                                       const Vector& assignment);

}  // namespace satsw::synth
