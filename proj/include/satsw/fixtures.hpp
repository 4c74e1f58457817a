#pragma once

#include "satsw/model.hpp"
#include "satsw/synth.hpp"

namespace satsw::fixtures {

/// Two-mode three-state benchmark plant with a single saturated input
/// (limit 1.0) used throughout the examples and regression tests.
SwitchedPlant benchmarkPlant();

/// The published output-feedback controller for benchmarkPlant() at
/// lambda0 = 0.1, mu = 4, s = 0.42 (gains as printed, 5 significant digits).
synth::HybridController publishedController();

/// Cyclic benchmark switching signal: mode 2 on [0,2), then alternation with
/// half-period 12 starting in mode 1, mode 1 from t = 50, horizon 70.
SwitchingSignal benchmarkSignal();

struct SweepRow {
    double lambda0;
    double mu;
    double gamma;  // published minimum
};

/// Published (lambda0, mu) -> gamma sweep grid for benchmarkPlant().
std::vector<SweepRow> publishedSweep();

/// Headline operating point: gamma at lambda0 = 0.1, mu = 4.
inline constexpr double kHeadlineGamma = 0.6953;

}  // namespace satsw::fixtures
