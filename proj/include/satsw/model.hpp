#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "satsw/linalg.hpp"

namespace satsw {

using linalg::Matrix;
using linalg::Vector;

/// One subsystem of the switched plant:
///   xdot = A_p x + B_p1 w + B_p2 sat(u)
///   z    = C_p1 x + D_p11 w + D_p12 sat(u)
///   y    = C_p2 x + D_p21 w            (D_p22 = 0 required)
struct PlantMode {
    Matrix A_p, B_p1, B_p2;
    Matrix C_p1, D_p11, D_p12;
    Matrix C_p2, D_p21, D_p22;
};

struct SwitchedPlant {
    std::vector<PlantMode> modes;
    Vector u_bar;  // positive saturation limits, size n_u

    int numModes() const { return static_cast<int>(modes.size()); }
    int n() const { return static_cast<int>(modes.at(0).A_p.rows()); }
    int nu() const { return static_cast<int>(modes.at(0).B_p2.cols()); }
    int nw() const { return static_cast<int>(modes.at(0).B_p1.cols()); }
    int nz() const { return static_cast<int>(modes.at(0).C_p1.rows()); }
    int ny() const { return static_cast<int>(modes.at(0).C_p2.rows()); }

    /// Largest plant entry magnitude, used for scale-aware margins.
    double maxEntry() const;

    /// Throws DimensionMismatch unless all modes share consistent shapes
    /// and every saturation limit is positive.
    void checkDimensions() const;
};

enum class GammaMode { Minimize, Fixed };

struct SynthesisSpec {
    double lambda0 = 0.1;  // decay rate, 1/s
    double mu = 4.0;       // Lyapunov jump factor, > 1
    double s = 0.42;       // disturbance energy level
    GammaMode gamma_mode = GammaMode::Minimize;
    double gamma_fixed = 1.0;             // used when gamma_mode == Fixed
    double epsilon = 0.0;                 // strict margin; 0 -> scale-aware default
    double delta = 1e-8;                  // psd slack
    std::optional<double> kappa;          // optional spectral-norm gain bound

    double effectiveEpsilon(const SwitchedPlant& plant) const;
    void check() const;  // mu > 1, lambda0 > 0, s > 0, eps > delta > 0
};

struct SwitchingSignal {
    std::vector<std::pair<double, int>> segments;  // (start_time, mode 1..N_p)
    double horizon = 0.0;

    void check(int numModes) const;
    int modeAt(double t) const;                 // active mode, 1-based
    std::vector<double> switchTimes() const;    // interior switch instants
};

struct PulseDisturbance {
    double magnitude = 0.0;
    double t_on = 0.0;
    double t_off = 0.0;
};

struct SampledDisturbance {
    std::vector<double> times;               // increasing, covering [0, T_f]
    std::vector<Vector> values;              // one n_w vector per time
};

struct Disturbance {
    // zero is represented by an empty variant
    std::variant<std::monostate, PulseDisturbance, SampledDisturbance> kind;
    int dimension = 1;

    static Disturbance zero(int nw = 1);
    static Disturbance pulse(double magnitude, double tOn, double tOff);
    static Disturbance samples(std::vector<double> times, std::vector<Vector> values);

    Vector at(double t) const;
    bool isZero() const { return std::holds_alternative<std::monostate>(kind); }
};

struct ModeValidation {
    int mode_index = 0;  // 1-based
    bool stabilizable = false;
    bool detectable = false;
    bool feedthrough_zero = false;  // A2
    std::vector<double> unstable_eigenvalues;  // Re(lambda) >= 0
};

struct ValidationReport {
    std::vector<ModeValidation> modes;
    bool pass = false;
    std::string summary() const;
};

/// PBH stabilizability/detectability per mode (A1) and D_p22 = 0 (A2).
/// Throws DimensionMismatch on inconsistent shapes and AssumptionViolated
/// when A2 fails; A1 failures are reported, not thrown.
ValidationReport validatePlant(const SwitchedPlant& plant);

/// Energy of a disturbance over its support: integral of w^T w dt.
/// Closed form for pulses, trapezoid rule for sampled series.
double disturbanceEnergy(const Disturbance& d);

}  // namespace satsw
