#pragma once

#include <optional>
#include <vector>

#include "satsw/synth.hpp"

namespace satsw::hybridsim {

using linalg::Matrix;
using linalg::Vector;

struct TraceStep {
    double t = 0.0;
    int mode = 1;
    Vector x_p, x_k;
    Vector u, sat_u, dz_u;
    Vector w, z;
    bool in_region_h = true;    // |H_i x_cl| <= u_bar per channel
    bool in_ellipsoid = true;   // x_cl' P_i x_cl <= s^2
};

struct SwitchEvent {
    double t = 0.0;
    int from = 0, to = 0;
    Vector xk_before, xk_after;
};

struct SimulationTrace {
    double h = 0.0;
    std::vector<TraceStep> steps;
    std::vector<SwitchEvent> events;
    double disturbance_energy = 0.0;        // trapezoid of w'w on the grid
    double weighted_output_energy = 0.0;    // trapezoid of e^{-lambda t} z'z
    double lambda_weight = 0.0;             // lambda used for the z integral
};

/// Solve the deadzone algebraic loop u = a + D00 dz(u), dz(u) = u - sat(u).
/// Scalar inputs use the exact piecewise closed form; vector inputs a damped
/// fixed-point iteration (damping 0.5, tol 1e-10, 100 iterations).
std::pair<Vector, Vector> solveInputLoop(const Vector& a, const Matrix& d00,
                                         const Vector& u_bar);

struct SimulateOptions {
    double h = 1e-3;
    std::optional<double> lambda_weight;  // default: controller lambda0
    int record_stride = 1;                // keep every k-th step in the trace
};

/// Fixed-step classical fourth-order integration of the saturated closed loop
/// with controller resets applied between steps.  Switch instants are made
/// exact grid points by adjusting the step within each signal segment.
SimulationTrace simulate(const SwitchedPlant& plant, const synth::HybridController& ctrl,
                         const SwitchingSignal& signal, const Disturbance& dist,
                         const Vector& x0, double t_final, const SimulateOptions& opts = {});

/// sqrt( integral e^{-lambda t} z'z dt / integral w'w dt ) on the trace grid.
double weightedL2Ratio(const SimulationTrace& trace, double lambda);

struct AdtReport {
    int count = 0;
    double average = 0.0;  // horizon / count, infinity when count == 0
    std::optional<double> tau_a;
    std::optional<double> chatter_bound;  // minimal N0* at tau_a
    bool compliant = false;
    std::string summary() const;
};

AdtReport adtStats(const SwitchingSignal& signal, std::optional<double> tau_a = {});

SwitchingSignal cyclicSignal(double t_pre, int mode_pre, double period, int first_mode,
                             int second_mode, double t_tail_start, int tail_mode,
                             double t_final);

}  // namespace satsw::hybridsim
