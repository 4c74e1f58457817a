#pragma once

#include <string>
#include <vector>

#include "satsw/hybridsim.hpp"
#include "satsw/model.hpp"
#include "satsw/synth.hpp"

namespace satsw::io {

// JSON plant file: {"modes": [{"A_p": [[...]], ...}, ...], "u_bar": [...]}
SwitchedPlant loadPlant(const std::string& path);
void savePlant(const SwitchedPlant& plant, const std::string& path);
SwitchedPlant parsePlant(const std::string& text);

// JSON spec file: {"lambda0","mu","s","gamma": null|number,"epsilon","delta","kappa": null|number}
SynthesisSpec loadSpec(const std::string& path);
void saveSpec(const SynthesisSpec& spec, const std::string& path);
SynthesisSpec parseSpec(const std::string& text);

// Signal file: {"segments": [[t, mode], ...], "horizon": T_f}
SwitchingSignal loadSignal(const std::string& path);
void saveSignal(const SwitchingSignal& signal, const std::string& path);
SwitchingSignal parseSignal(const std::string& text);

// Controller JSON: per-mode matrices, resets keyed "i->j", scalars.
synth::HybridController loadController(const std::string& path);
void saveController(const synth::HybridController& ctrl, const std::string& path);
synth::HybridController parseController(const std::string& text);
std::string controllerToJson(const synth::HybridController& ctrl);

// Disturbance sample file: {"times": [...], "values": [[...], ...]}
Disturbance loadDisturbanceSamples(const std::string& path);

/// Disturbance spec grammar: zero | pulse:<mag>,<t_on>,<t_off> | file:<path>
Disturbance parseDisturbanceSpec(const std::string& spec);

// Trace CSV: t,mode,xp1..xpn,xk1..xkn,u1..,satu1..,w1..,z1..
std::string traceCsv(const hybridsim::SimulationTrace& trace);
// Event CSV: t,from,to,xk_before...,xk_after...
std::string eventCsv(const hybridsim::SimulationTrace& trace);

void writeFile(const std::string& path, const std::string& content);
std::string readFile(const std::string& path);

/// Minimal hand-assembled SVG line chart of named series over a shared
/// time axis (one polyline per series, axes and labels only).
struct Series {
    std::string label;
    std::vector<double> t;
    std::vector<double> y;
};
std::string svgLineChart(const std::string& title, const std::vector<Series>& series,
                         int width = 720, int height = 240);

/// Stacked charts matching the reference figure layout: z(t), sat(u)(t),
/// plant states, and the mode signal.
std::string traceSvg(const hybridsim::SimulationTrace& trace);

}  // namespace satsw::io
