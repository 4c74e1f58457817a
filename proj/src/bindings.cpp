#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satsw/accept.hpp"
#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/hybridsim.hpp"
#include "satsw/io.hpp"
#include "satsw/sdp.hpp"
#include "satsw/synth.hpp"

namespace py = pybind11;
using namespace satsw;

namespace {

struct SynthesisResult {
    synth::HybridController controller;
    sdp::SolveOutcome outcome;
};

SynthesisResult synthesize(const SwitchedPlant& plant, const SynthesisSpec& spec) {
    auto report = validatePlant(plant);
    if (!report.pass) throw AssumptionViolated(report.summary(), '1', 0);
    auto program = lmi::buildProgram(plant, spec);
    double eps = spec.effectiveEpsilon(plant);
    sdp::SolveOutcome out = spec.gamma_mode == GammaMode::Minimize
                                ? sdp::minimizeGamma(program, eps, spec.delta)
                                : sdp::solveFeasibility(program, eps, spec.delta);
    if (!out.feasible())
        throw NoConvergence("synthesis LMIs infeasible or solver failed: " + out.detail);
    double gamma = spec.gamma_mode == GammaMode::Minimize ? out.gamma : spec.gamma_fixed;
    return {synth::reconstruct(out.x, program, plant, spec, gamma), out};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "saturated switched-system synthesis toolkit";

    py::register_exception<Error>(m, "SatswError");

    py::class_<PlantMode>(m, "PlantMode")
        .def(py::init<>())
        .def_readwrite("A_p", &PlantMode::A_p)
        .def_readwrite("B_p1", &PlantMode::B_p1)
        .def_readwrite("B_p2", &PlantMode::B_p2)
        .def_readwrite("C_p1", &PlantMode::C_p1)
        .def_readwrite("D_p11", &PlantMode::D_p11)
        .def_readwrite("D_p12", &PlantMode::D_p12)
        .def_readwrite("C_p2", &PlantMode::C_p2)
        .def_readwrite("D_p21", &PlantMode::D_p21)
        .def_readwrite("D_p22", &PlantMode::D_p22);

    py::class_<SwitchedPlant>(m, "SwitchedPlant")
        .def(py::init<>())
        .def_readwrite("modes", &SwitchedPlant::modes)
        .def_readwrite("u_bar", &SwitchedPlant::u_bar)
        .def("num_modes", &SwitchedPlant::numModes)
        .def("check_dimensions", &SwitchedPlant::checkDimensions);

    py::enum_<GammaMode>(m, "GammaMode")
        .value("Minimize", GammaMode::Minimize)
        .value("Fixed", GammaMode::Fixed);

    py::class_<SynthesisSpec>(m, "SynthesisSpec")
        .def(py::init<>())
        .def_readwrite("lambda0", &SynthesisSpec::lambda0)
        .def_readwrite("mu", &SynthesisSpec::mu)
        .def_readwrite("s", &SynthesisSpec::s)
        .def_readwrite("gamma_mode", &SynthesisSpec::gamma_mode)
        .def_readwrite("gamma_fixed", &SynthesisSpec::gamma_fixed)
        .def_readwrite("epsilon", &SynthesisSpec::epsilon)
        .def_readwrite("delta", &SynthesisSpec::delta)
        .def_readwrite("kappa", &SynthesisSpec::kappa)
        .def("check", &SynthesisSpec::check);

    py::class_<SwitchingSignal>(m, "SwitchingSignal")
        .def(py::init<>())
        .def_readwrite("segments", &SwitchingSignal::segments)
        .def_readwrite("horizon", &SwitchingSignal::horizon)
        .def("check", &SwitchingSignal::check)
        .def("mode_at", &SwitchingSignal::modeAt)
        .def("switch_times", &SwitchingSignal::switchTimes);

    py::class_<Disturbance>(m, "Disturbance")
        .def_static("zero", &Disturbance::zero, py::arg("nw") = 1)
        .def_static("pulse", &Disturbance::pulse)
        .def_static("samples", &Disturbance::samples)
        .def("at", &Disturbance::at)
        .def("is_zero", &Disturbance::isZero);

    py::class_<ModeValidation>(m, "ModeValidation")
        .def_readonly("mode_index", &ModeValidation::mode_index)
        .def_readonly("stabilizable", &ModeValidation::stabilizable)
        .def_readonly("detectable", &ModeValidation::detectable)
        .def_readonly("feedthrough_zero", &ModeValidation::feedthrough_zero)
        .def_readonly("unstable_eigenvalues", &ModeValidation::unstable_eigenvalues);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("modes", &ValidationReport::modes)
        .def_readonly("pass_", &ValidationReport::pass)
        .def("summary", &ValidationReport::summary);

    py::enum_<sdp::SolveStatus>(m, "SolveStatus")
        .value("Optimal", sdp::SolveStatus::Optimal)
        .value("Feasible", sdp::SolveStatus::Feasible)
        .value("Infeasible", sdp::SolveStatus::Infeasible)
        .value("NumericalFailure", sdp::SolveStatus::NumericalFailure);

    py::class_<sdp::SolveOutcome>(m, "SolveOutcome")
        .def_readonly("status", &sdp::SolveOutcome::status)
        .def_readonly("x", &sdp::SolveOutcome::x)
        .def_readonly("gamma", &sdp::SolveOutcome::gamma)
        .def_readonly("objective", &sdp::SolveOutcome::objective)
        .def_readonly("iterations", &sdp::SolveOutcome::iterations)
        .def_readonly("detail", &sdp::SolveOutcome::detail)
        .def("feasible", &sdp::SolveOutcome::feasible);

    py::class_<synth::ControllerMode>(m, "ControllerMode")
        .def_readwrite("A_k", &synth::ControllerMode::A_k)
        .def_readwrite("B_k1", &synth::ControllerMode::B_k1)
        .def_readwrite("B_k2", &synth::ControllerMode::B_k2)
        .def_readwrite("C_k1", &synth::ControllerMode::C_k1)
        .def_readwrite("D_k11", &synth::ControllerMode::D_k11)
        .def_readwrite("D_k12", &synth::ControllerMode::D_k12)
        .def_readwrite("H1", &synth::ControllerMode::H1)
        .def_readwrite("H2", &synth::ControllerMode::H2)
        .def_readwrite("P", &synth::ControllerMode::P)
        .def_readwrite("U", &synth::ControllerMode::U);

    py::class_<synth::HybridController>(m, "HybridController")
        .def(py::init<>())
        .def_readwrite("modes", &synth::HybridController::modes)
        .def_readwrite("resets", &synth::HybridController::resets)
        .def_readwrite("gamma", &synth::HybridController::gamma)
        .def_readwrite("lambda0", &synth::HybridController::lambda0)
        .def_readwrite("mu", &synth::HybridController::mu)
        .def_readwrite("s", &synth::HybridController::s)
        .def_readwrite("tau_a_star", &synth::HybridController::tau_a_star)
        .def("num_modes", &synth::HybridController::numModes)
        .def("reset", &synth::HybridController::reset,
             py::return_value_policy::reference_internal);

    py::class_<synth::CertificateReport>(m, "CertificateReport")
        .def_readonly("dissipation_lambda_max",
                      &synth::CertificateReport::dissipation_lambda_max)
        .def_readonly("p_lambda_min", &synth::CertificateReport::p_lambda_min)
        .def_readonly("boundary_lambda_min", &synth::CertificateReport::boundary_lambda_min)
        .def_readonly("inclusion_slack", &synth::CertificateReport::inclusion_slack)
        .def_readonly("pass_", &synth::CertificateReport::pass)
        .def("summary", &synth::CertificateReport::summary);

    py::class_<SynthesisResult>(m, "SynthesisResult")
        .def_readonly("controller", &SynthesisResult::controller)
        .def_readonly("outcome", &SynthesisResult::outcome);

    py::class_<hybridsim::TraceStep>(m, "TraceStep")
        .def_readonly("t", &hybridsim::TraceStep::t)
        .def_readonly("mode", &hybridsim::TraceStep::mode)
        .def_readonly("x_p", &hybridsim::TraceStep::x_p)
        .def_readonly("x_k", &hybridsim::TraceStep::x_k)
        .def_readonly("u", &hybridsim::TraceStep::u)
        .def_readonly("sat_u", &hybridsim::TraceStep::sat_u)
        .def_readonly("dz_u", &hybridsim::TraceStep::dz_u)
        .def_readonly("w", &hybridsim::TraceStep::w)
        .def_readonly("z", &hybridsim::TraceStep::z)
        .def_readonly("in_region_h", &hybridsim::TraceStep::in_region_h)
        .def_readonly("in_ellipsoid", &hybridsim::TraceStep::in_ellipsoid);

    py::class_<hybridsim::SwitchEvent>(m, "SwitchEvent")
        .def_readonly("t", &hybridsim::SwitchEvent::t)
        .def_readonly("from_mode", &hybridsim::SwitchEvent::from)
        .def_readonly("to_mode", &hybridsim::SwitchEvent::to)
        .def_readonly("xk_before", &hybridsim::SwitchEvent::xk_before)
        .def_readonly("xk_after", &hybridsim::SwitchEvent::xk_after);

    py::class_<hybridsim::SimulationTrace>(m, "SimulationTrace")
        .def_readonly("h", &hybridsim::SimulationTrace::h)
        .def_readonly("steps", &hybridsim::SimulationTrace::steps)
        .def_readonly("events", &hybridsim::SimulationTrace::events)
        .def_readonly("disturbance_energy", &hybridsim::SimulationTrace::disturbance_energy)
        .def_readonly("weighted_output_energy",
                      &hybridsim::SimulationTrace::weighted_output_energy)
        .def_readonly("lambda_weight", &hybridsim::SimulationTrace::lambda_weight);

    py::class_<hybridsim::AdtReport>(m, "AdtReport")
        .def_readonly("count", &hybridsim::AdtReport::count)
        .def_readonly("average", &hybridsim::AdtReport::average)
        .def_readonly("tau_a", &hybridsim::AdtReport::tau_a)
        .def_readonly("chatter_bound", &hybridsim::AdtReport::chatter_bound)
        .def_readonly("compliant", &hybridsim::AdtReport::compliant)
        .def("summary", &hybridsim::AdtReport::summary);

    m.def("validate_plant", &validatePlant);
    m.def("disturbance_energy", &disturbanceEnergy);
    m.def("synthesize", &synthesize, py::arg("plant"), py::arg("spec"),
          "validate, solve the synthesis LMIs and reconstruct the controller");
    m.def("verify_certificate", &synth::verifyCertificate, py::arg("controller"),
          py::arg("plant"), py::arg("delta") = 1e-8);
    m.def("dwell_time_bound", &synth::dwellTimeBound);
    m.def(
        "simulate",
        [](const SwitchedPlant& plant, const synth::HybridController& ctrl,
           const SwitchingSignal& signal, const Disturbance& dist, const Vector& x0,
           double t_final, double h, int record_stride) {
            hybridsim::SimulateOptions opts;
            opts.h = h;
            opts.record_stride = record_stride;
            return hybridsim::simulate(plant, ctrl, signal, dist, x0, t_final, opts);
        },
        py::arg("plant"), py::arg("controller"), py::arg("signal"), py::arg("disturbance"),
        py::arg("x0"), py::arg("t_final"), py::arg("h") = 1e-3,
        py::arg("record_stride") = 1);
    m.def("weighted_l2_ratio", &hybridsim::weightedL2Ratio);
    m.def("adt_stats", &hybridsim::adtStats, py::arg("signal"),
          py::arg("tau_a") = std::optional<double>());
    m.def("cyclic_signal", &hybridsim::cyclicSignal);

    m.def("load_plant", &io::loadPlant);
    m.def("save_plant", &io::savePlant);
    m.def("load_spec", &io::loadSpec);
    m.def("save_spec", &io::saveSpec);
    m.def("load_signal", &io::loadSignal);
    m.def("save_signal", &io::saveSignal);
    m.def("load_controller", &io::loadController);
    m.def("save_controller", &io::saveController);
    m.def("parse_disturbance_spec", &io::parseDisturbanceSpec);

    m.def("benchmark_plant", &fixtures::benchmarkPlant);
    m.def("published_controller", &fixtures::publishedController);
    m.def("benchmark_signal", &fixtures::benchmarkSignal);
    m.attr("HEADLINE_GAMMA") = fixtures::kHeadlineGamma;

    m.def("run_acceptance_suite", [](bool fast) {
        auto results = accept::runAcceptanceSuite(fast);
        py::list out;
        for (const auto& r : results) {
            py::dict d;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["skipped"] = r.skipped;
            d["detail"] = r.detail;
            out.append(std::move(d));
        }
        return out;
    }, py::arg("fast") = true);
}
