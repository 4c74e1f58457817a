// satsw: synthesis and verification for saturated switched systems with
// average dwell-time switching and controller-state resets.
#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "satsw/accept.hpp"
#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/hybridsim.hpp"
#include "satsw/io.hpp"
#include "satsw/sdp.hpp"
#include "satsw/synth.hpp"

using namespace satsw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;

struct SpecOverrides {
    std::optional<double> lambda0, mu, s, gamma, kappa;
    void apply(SynthesisSpec& spec) const {
        if (lambda0) spec.lambda0 = *lambda0;
        if (mu) spec.mu = *mu;
        if (s) spec.s = *s;
        if (gamma) {
            spec.gamma_mode = GammaMode::Fixed;
            spec.gamma_fixed = *gamma;
        }
        if (kappa) spec.kappa = *kappa;
        spec.check();
    }
};

int cmdValidate(const std::string& plantFile) {
    auto plant = io::loadPlant(plantFile);
    auto report = validatePlant(plant);
    std::cout << report.summary() << "\n";
    return report.pass ? kExitOk : kExitInfeasible;
}

int cmdSynthesize(const std::string& plantFile, const std::string& specFile,
                  const std::string& outFile, const SpecOverrides& ov) {
    auto plant = io::loadPlant(plantFile);
    auto report = validatePlant(plant);
    if (!report.pass) {
        std::cerr << "plant validation failed:\n" << report.summary() << "\n";
        return kExitInfeasible;
    }
    SynthesisSpec spec = specFile.empty() ? SynthesisSpec{} : io::loadSpec(specFile);
    ov.apply(spec);

    auto program = lmi::buildProgram(plant, spec);
    double eps = spec.effectiveEpsilon(plant);
    sdp::SolveOutcome outcome;
    double gamma = 0.0;
    if (spec.gamma_mode == GammaMode::Minimize) {
        outcome = sdp::minimizeGamma(program, eps, spec.delta);
        gamma = outcome.gamma;
    } else {
        outcome = sdp::solveFeasibility(program, eps, spec.delta);
        gamma = spec.gamma_fixed;
    }
    if (!outcome.feasible()) {
        std::cerr << "synthesis " << sdp::to_string(outcome.status)
                  << " at strict margin epsilon = " << eps;
        if (!outcome.detail.empty()) std::cerr << " (" << outcome.detail << ")";
        std::cerr << "\n";
        return kExitInfeasible;
    }

    auto ctrl = synth::reconstruct(outcome.x, program, plant, spec, gamma);
    auto cert = synth::verifyCertificate(ctrl, plant, spec.delta);
    std::cout << "status: " << sdp::to_string(outcome.status) << "\n"
              << "gamma: " << gamma << "\n"
              << "tau_a_star: " << ctrl.tau_a_star << " s\n"
              << "certificates:\n"
              << cert.summary() << "\n";
    if (!cert.pass) return kExitInfeasible;
    if (!outFile.empty()) io::saveController(ctrl, outFile);
    return kExitOk;
}

int cmdSweep(const std::string& plantFile, const std::string& gridFile,
             const std::string& outCsv) {
    auto plant = io::loadPlant(plantFile);
    nlohmann::json grid = nlohmann::json::parse(io::readFile(gridFile), nullptr, false);
    if (grid.is_discarded() || !grid.contains("pairs"))
        throw ParseError("grid: expected {\"pairs\": [[lambda0, mu], ...], \"s\": ...}");
    double s = grid.value("s", 0.42);
    std::optional<double> cap;
    if (grid.contains("gamma_cap") && !grid["gamma_cap"].is_null())
        cap = grid["gamma_cap"].get<double>();

    struct Row {
        double lambda0, mu, tau = 0.0, gamma = 0.0;
        std::string status = "error";
    };
    std::vector<Row> rows;
    for (const auto& p : grid["pairs"]) {
        Row r;
        r.lambda0 = p.at(0).get<double>();
        r.mu = p.at(1).get<double>();
        rows.push_back(r);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            auto& r = rows[i];
            try {
                SynthesisSpec spec;
                spec.lambda0 = r.lambda0;
                spec.mu = r.mu;
                spec.s = s;
                spec.check();
                r.tau = synth::dwellTimeBound(r.lambda0, r.mu);
                auto program = lmi::buildProgram(plant, spec);
                sdp::SolverOptions so;
                so.gamma_cap = cap;
                auto res =
                    sdp::minimizeGamma(program, spec.effectiveEpsilon(plant), spec.delta, so);
                if (res.feasible()) {
                    r.gamma = res.gamma;
                    r.status = "ok";
                } else {
                    r.status = res.status == sdp::SolveStatus::Infeasible ? "infeasible"
                                                                          : "failed";
                }
            } catch (const Error& e) {
                r.status = "error";
            }
        }
    };
    unsigned nthreads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                        rows.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream os;
    os.precision(10);
    os << "lambda0,mu,tau_a_star,gamma,status\n";
    for (const auto& r : rows) {
        os << r.lambda0 << "," << r.mu << "," << r.tau << ",";
        if (r.status == "ok") os << r.gamma;
        os << "," << r.status << "\n";
        std::cout << "(" << r.lambda0 << ", " << r.mu << "): " << r.status;
        if (r.status == "ok") std::cout << " gamma = " << r.gamma;
        std::cout << "\n";
    }
    if (!outCsv.empty())
        io::writeFile(outCsv, os.str());
    else
        std::cout << os.str();
    return kExitOk;
}

int cmdSimulate(const std::string& plantFile, const std::string& ctrlFile,
                const std::string& signalFile, const std::string& distSpec, double step,
                double tFinal, const std::string& outPrefix, const std::string& svgFile) {
    auto plant = io::loadPlant(plantFile);
    auto ctrl = ctrlFile == "builtin" ? fixtures::publishedController()
                                      : io::loadController(ctrlFile);
    auto signal = signalFile == "builtin" ? fixtures::benchmarkSignal()
                                          : io::loadSignal(signalFile);
    auto dist = io::parseDisturbanceSpec(distSpec);
    double energy = disturbanceEnergy(dist);
    if (energy > ctrl.s * ctrl.s)
        std::cerr << "warning: disturbance energy " << energy << " exceeds s^2 = "
                  << ctrl.s * ctrl.s << " (outside the certified disturbance set)\n";

    hybridsim::SimulateOptions so;
    so.h = step;
    auto trace = hybridsim::simulate(plant, ctrl, signal, dist, Vector::Zero(2 * plant.n()),
                                     tFinal, so);
    io::writeFile(outPrefix + "_trace.csv", io::traceCsv(trace));
    io::writeFile(outPrefix + "_events.csv", io::eventCsv(trace));
    if (!svgFile.empty()) io::writeFile(svgFile, io::traceSvg(trace));

    auto adt = hybridsim::adtStats(signal, ctrl.tau_a_star);
    std::cout << adt.summary() << "\n";
    if (energy > 0.0)
        std::cout << "weighted L2 ratio (lambda = " << ctrl.lambda0
                  << "): " << hybridsim::weightedL2Ratio(trace, ctrl.lambda0) << "\n";
    return kExitOk;
}

int cmdVerify(const std::string& plantFile, const std::string& ctrlFile) {
    auto plant = io::loadPlant(plantFile);
    auto ctrl = io::loadController(ctrlFile);
    auto rep = synth::verifyCertificate(ctrl, plant);
    std::cout << rep.summary() << "\n";
    return rep.pass ? kExitOk : kExitInfeasible;
}

int cmdReproduce(bool fast, bool json) {
    auto results = accept::runAcceptanceSuite(fast);
    std::cout << (json ? accept::resultsJson(results) : accept::formatResults(results));
    return accept::allPassed(results) ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthesis and verification for saturated switched systems"};
    app.require_subcommand(1);

    std::string plantFile, specFile, outFile, gridFile, outCsv, ctrlFile, signalFile;
    std::string distSpec = "zero", outPrefix = "sim", svgFile;
    SpecOverrides ov;
    double step = 1e-3, tFinal = 70.0;
    bool fast = false, jsonOut = false;

    auto* validate = app.add_subcommand("validate", "check plant assumptions");
    validate->add_option("plant", plantFile, "plant JSON file")->required();

    auto* synthesize = app.add_subcommand("synthesize", "run the synthesis pipeline");
    synthesize->add_option("plant", plantFile, "plant JSON file")->required();
    synthesize->add_option("--spec", specFile, "synthesis spec JSON file");
    synthesize->add_option("-o,--out", outFile, "controller output JSON file");
    synthesize->add_option("--lambda0", ov.lambda0, "decay rate");
    synthesize->add_option("--mu", ov.mu, "Lyapunov jump factor");
    synthesize->add_option("--s", ov.s, "disturbance energy level");
    synthesize->add_option("--gamma", ov.gamma, "fixed performance level");
    synthesize->add_option("--kappa", ov.kappa, "controller gain bound");

    auto* sweep = app.add_subcommand("sweep", "gamma sweep over a (lambda0, mu) grid");
    sweep->add_option("plant", plantFile, "plant JSON file")->required();
    sweep->add_option("grid", gridFile, "grid JSON file")->required();
    sweep->add_option("-o,--out", outCsv, "output CSV file");

    auto* simulate = app.add_subcommand("simulate", "simulate the hybrid closed loop");
    simulate->add_option("plant", plantFile, "plant JSON file")->required();
    simulate->add_option("controller", ctrlFile, "controller JSON file or 'builtin'")
        ->required();
    simulate->add_option("signal", signalFile, "signal JSON file or 'builtin'")->required();
    simulate->add_option("--dist", distSpec,
                         "zero | pulse:<mag>,<t_on>,<t_off> | file:<path>");
    simulate->add_option("--step", step, "integration step");
    simulate->add_option("--tfinal", tFinal, "final time");
    simulate->add_option("--out-prefix", outPrefix, "output file prefix");
    simulate->add_option("--svg", svgFile, "write SVG plots to this file");

    auto* verify = app.add_subcommand("verify", "verify controller certificates");
    verify->add_option("plant", plantFile, "plant JSON file")->required();
    verify->add_option("controller", ctrlFile, "controller JSON file")->required();

    auto* repro = app.add_subcommand("reproduce-example", "run the bundled benchmark suite");
    repro->add_flag("--fast", fast, "skip the sweep");
    repro->add_flag("--json", jsonOut, "machine-readable summary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmdValidate(plantFile);
        if (app.got_subcommand(synthesize))
            return cmdSynthesize(plantFile, specFile, outFile, ov);
        if (app.got_subcommand(sweep)) return cmdSweep(plantFile, gridFile, outCsv);
        if (app.got_subcommand(simulate))
            return cmdSimulate(plantFile, ctrlFile, signalFile, distSpec, step, tFinal,
                               outPrefix, svgFile);
        if (app.got_subcommand(verify)) return cmdVerify(plantFile, ctrlFile);
        if (app.got_subcommand(repro)) return cmdReproduce(fast, jsonOut);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DimensionMismatch& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitInputError;
}
