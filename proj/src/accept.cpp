#include "satsw/accept.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/hybridsim.hpp"
#include "satsw/io.hpp"
#include "satsw/sdp.hpp"
#include "satsw/synth.hpp"

namespace satsw::accept {

namespace {

using linalg::Matrix;
using linalg::Vector;

struct SweepResult {
    double lambda0, mu, ref;
    double gamma = 0.0;
    bool ok = false;
};

std::vector<SweepResult> runSweep(const SwitchedPlant& plant) {
    std::vector<SweepResult> out;
    for (const auto& row : fixtures::publishedSweep()) {
        SweepResult r{row.lambda0, row.mu, row.gamma};
        SynthesisSpec spec;
        spec.lambda0 = row.lambda0;
        spec.mu = row.mu;
        auto prog = lmi::buildProgram(plant, spec);
        auto res = sdp::minimizeGamma(prog, spec.effectiveEpsilon(plant), spec.delta);
        r.ok = res.feasible();
        r.gamma = res.gamma;
        out.push_back(r);
    }
    return out;
}

struct Synthesized {
    lmi::LmiProgram program;
    sdp::SolveOutcome outcome;
    synth::HybridController controller;
};

Synthesized synthesizeHeadline(const SwitchedPlant& plant) {
    SynthesisSpec spec;  // lambda0 = 0.1, mu = 4, s = 0.42
    Synthesized s{lmi::buildProgram(plant, spec), {}, {}};
    s.outcome = sdp::minimizeGamma(s.program, spec.effectiveEpsilon(plant), spec.delta);
    if (s.outcome.feasible())
        s.controller = synth::reconstruct(s.outcome.x, s.program, plant, spec, s.outcome.gamma);
    return s;
}

Synthesized synthesizeFixed(const SwitchedPlant& plant, double gamma) {
    SynthesisSpec spec;
    spec.gamma_mode = GammaMode::Fixed;
    spec.gamma_fixed = gamma;
    Synthesized s{lmi::buildProgram(plant, spec), {}, {}};
    s.outcome = sdp::solveFeasibility(s.program, spec.effectiveEpsilon(plant), spec.delta);
    if (s.outcome.feasible())
        s.controller = synth::reconstruct(s.outcome.x, s.program, plant, spec, gamma);
    return s;
}

/// Independent brute-force chatter bound: dense scan over candidate window
/// endpoints (switch instants plus midpoints), closed-window counting.
double bruteForceChatter(const SwitchingSignal& sig, double tau_a) {
    std::vector<double> sw = sig.switchTimes();
    std::vector<double> pts = {0.0, sig.horizon};
    for (double t : sw) pts.push_back(t);
    for (std::size_t i = 1; i < sw.size(); ++i) pts.push_back(0.5 * (sw[i - 1] + sw[i]));
    if (!sw.empty()) {
        pts.push_back(0.5 * sw.front());
        pts.push_back(0.5 * (sw.back() + sig.horizon));
    }
    double best = 0.0;
    for (double lo : pts)
        for (double hi : pts) {
            if (hi < lo) continue;
            int cnt = 0;
            for (double t : sw)
                if (t >= lo && t <= hi) ++cnt;
            best = std::max(best, cnt - (hi - lo) / tau_a);
        }
    return best;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<CriterionResult> runAcceptanceSuite(bool fast) {
    std::vector<CriterionResult> out;
    const SwitchedPlant plant = fixtures::benchmarkPlant();

    // --- Table 1 sweep + monotonicity -------------------------------------
    std::vector<SweepResult> sweep;
    double sweepSeconds = 0.0;
    if (!fast) {
        auto t0 = std::chrono::steady_clock::now();
        sweep = runSweep(plant);
        sweepSeconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    {
        CriterionResult c{"table1-reproduction"};
        if (fast) {
            c.skipped = true;
            c.pass = true;
            c.detail = "skipped (--fast)";
        } else {
            bool ok = sweepSeconds < 60.0;
            std::ostringstream os;
            for (const auto& r : sweep) {
                double rel = std::abs(r.gamma - r.ref) / r.ref;
                if (!r.ok || rel > 0.10) ok = false;
                os << "(" << r.lambda0 << "," << r.mu << ") gamma=" << fmt(r.gamma)
                   << " ref=" << r.ref << " rel=" << fmt(rel) << "; ";
            }
            os << "runtime " << fmt(sweepSeconds) << "s";
            c.pass = ok;
            c.detail = os.str();
        }
        out.push_back(c);
    }

    Synthesized head = synthesizeHeadline(plant);
    {
        CriterionResult c{"headline-point"};
        double tas = synth::dwellTimeBound(0.1, 4.0);
        bool ok = head.outcome.feasible() &&
                  std::abs(head.outcome.gamma - 0.6953) / 0.6953 <= 0.10 &&
                  std::abs(tas - 13.8629) < 5e-5;
        c.pass = ok;
        c.detail = "gamma=" + fmt(head.outcome.gamma) + " (ref 0.6953), tau_a*=" + fmt(tas);
        out.push_back(c);
    }
    {
        CriterionResult c{"gamma-monotone-in-mu"};
        if (fast) {
            c.skipped = true;
            c.pass = true;
            c.detail = "skipped (--fast)";
        } else {
            auto g = [&](double l0, double mu) {
                for (const auto& r : sweep)
                    if (r.lambda0 == l0 && r.mu == mu) return r.gamma;
                return -1.0;
            };
            bool ok = g(0.05, 3.4) >= g(0.05, 3.8) && g(0.05, 3.8) >= g(0.05, 4.2) &&
                      g(0.1, 3.8) >= g(0.1, 4.2) && g(0.1, 4.2) >= g(0.1, 4.6);
            c.pass = ok;
            c.detail = "exact ordering at lambda0 in {0.05, 0.1}";
        }
        out.push_back(c);
    }

    // --- Certificates and round trips -------------------------------------
    {
        CriterionResult c{"certificate-oracle"};
        bool ok = head.outcome.feasible();
        std::ostringstream os;
        if (ok) {
            auto rep = synth::verifyCertificate(head.controller, plant, 1e-8);
            auto cong = synth::congruenceResidual(head.controller, plant, head.program,
                                                  head.outcome.x);
            ok = rep.pass;
            double worst = 0.0;
            for (double r : cong) worst = std::max(worst, r);
            ok = ok && worst <= 1e-7;
            os << "verify " << (rep.pass ? "pass" : "fail") << ", congruence residual "
               << fmt(worst) << " (tol 1e-7)";
        } else {
            os << "synthesis infeasible";
        }
        c.pass = ok;
        c.detail = os.str();
        out.push_back(c);
    }
    {
        CriterionResult c{"round-trip-reconstruction"};
        bool ok = head.outcome.feasible();
        double worst = 0.0;
        if (ok) {
            auto hatted = synth::rederiveHatted(head.controller, plant, head.outcome.x,
                                                head.program);
            const auto& reg = head.program.registry;
            auto rel = [&](const Matrix& a, const Matrix& b) {
                return (a - b).cwiseAbs().maxCoeff() /
                       std::max(1.0, b.cwiseAbs().maxCoeff());
            };
            for (int i = 1; i <= head.program.numModes; ++i) {
                const auto& h = hatted[i - 1];
                std::string si = std::to_string(i);
                worst = std::max({worst,
                                  rel(h.Ah, reg.value("Ah(" + si + ")", head.outcome.x)),
                                  rel(h.Bh1, reg.value("Bh1(" + si + ")", head.outcome.x)),
                                  rel(h.Bh2, reg.value("Bh2(" + si + ")", head.outcome.x)),
                                  rel(h.Ch1, reg.value("Ch1(" + si + ")", head.outcome.x)),
                                  rel(h.Dh11, reg.value("Dh11(" + si + ")", head.outcome.x)),
                                  rel(h.Dh12, reg.value("Dh12(" + si + ")", head.outcome.x)),
                                  rel(h.Hh1, reg.value("Hh1(" + si + ")", head.outcome.x)),
                                  rel(h.Hh2, reg.value("Hh2(" + si + ")", head.outcome.x))});
                for (const auto& [ij, dh] : h.DeltaHat) {
                    std::string nm = "Del(" + std::to_string(ij.first) + "," +
                                     std::to_string(ij.second) + ")";
                    worst = std::max(worst, rel(dh, reg.value(nm, head.outcome.x)));
                }
            }
            ok = worst <= 1e-8;
        }
        c.pass = ok;
        c.detail = "max relative residual " + fmt(worst) + " (tol 1e-8)";
        out.push_back(c);
    }

    // --- Published-controller regression ----------------------------------
    {
        CriterionResult c{"published-controller-regression"};
        auto ctrl = fixtures::publishedController();
        auto sig = fixtures::benchmarkSignal();
        auto t0 = std::chrono::steady_clock::now();
        try {
            hybridsim::SimulateOptions so;
            so.h = 1e-3;
            so.record_stride = 10;
            auto trace = hybridsim::simulate(plant, ctrl, sig,
                                             Disturbance::pulse(0.6, 0.0, 0.4),
                                             Vector::Zero(6), 70.0, so);
            double n50 = 0.0, n70 = 0.0;
            for (const auto& st : trace.steps) {
                double nn = std::hypot(st.x_p.norm(), st.x_k.norm());
                if (std::abs(st.t - 50.0) < 1e-9) n50 = nn;
                if (std::abs(st.t - 70.0) < 1e-9) n70 = nn;
            }
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            c.pass = n70 < n50 && secs < 5.0;
            c.detail = "|x_cl(50)|=" + fmt(n50) + " |x_cl(70)|=" + fmt(n70) + " in " +
                       fmt(secs) + "s";
        } catch (const NonFiniteState& e) {
            c.pass = false;
            c.detail = std::string("trace diverged: ") + e.what();
        }
        out.push_back(c);
    }

    // --- Empirical gain bound ---------------------------------------------
    {
        CriterionResult c{"empirical-gain-bound"};
        // A fixed-gamma feasibility solve gives a max-margin (well-conditioned)
        // certified controller; the guarantee then holds at that gamma level.
        Synthesized fixed = synthesizeFixed(plant, 0.75);
        bool ok = fixed.outcome.feasible();
        std::ostringstream os;
        if (ok) {
            auto rep = synth::verifyCertificate(fixed.controller, plant, 1e-8);
            ok = rep.pass;
            if (ok) {
                auto dist = Disturbance::pulse(0.6, 0.0, 0.4);
                hybridsim::SimulateOptions so;
                so.h = 5e-4;
                so.record_stride = 4;
                auto trace = hybridsim::simulate(plant, fixed.controller,
                                                 fixtures::benchmarkSignal(), dist,
                                                 Vector::Zero(6), 70.0, so);
                double ratio = hybridsim::weightedL2Ratio(trace, 0.1);
                ok = ratio <= fixed.controller.gamma;
                os << "energy " << fmt(disturbanceEnergy(dist)) << " <= s^2 0.1764, ratio "
                   << fmt(ratio) << " <= gamma " << fmt(fixed.controller.gamma);
            } else {
                os << "certificate failed for fixed-gamma controller";
            }
        } else {
            os << "fixed-gamma solve infeasible";
        }
        c.pass = ok;
        c.detail = os.str();
        out.push_back(c);
    }

    // --- Integrator oracle -------------------------------------------------
    {
        CriterionResult c{"integrator-oracle"};
        SwitchedPlant lti;
        PlantMode pm;
        pm.A_p.resize(2, 2);
        // fast enough that the fourth-order error term dominates roundoff
        pm.A_p << -4.0, 10.0, -10.0, -3.0;
        pm.B_p1 = Matrix::Zero(2, 1);
        pm.B_p2 = Matrix::Zero(2, 1);
        pm.C_p1 = Matrix::Zero(1, 2);
        pm.D_p11 = Matrix::Zero(1, 1);
        pm.D_p12 = Matrix::Zero(1, 1);
        pm.C_p2 = Matrix::Zero(1, 2);
        pm.D_p21 = Matrix::Zero(1, 1);
        pm.D_p22 = Matrix::Zero(1, 1);
        lti.modes = {pm};
        lti.u_bar = Vector::Constant(1, 1.0);

        synth::HybridController zero;
        synth::ControllerMode zm;
        zm.A_k = Matrix::Zero(2, 2);
        zm.B_k1 = Matrix::Zero(2, 1);
        zm.B_k2 = Matrix::Zero(2, 1);
        zm.C_k1 = Matrix::Zero(1, 2);
        zm.D_k11 = Matrix::Zero(1, 1);
        zm.D_k12 = Matrix::Zero(1, 1);
        zero.modes = {zm};
        zero.lambda0 = 0.1;
        zero.mu = 4.0;
        zero.s = 0.42;
        zero.gamma = 1.0;
        zero.tau_a_star = synth::dwellTimeBound(0.1, 4.0);

        SwitchingSignal sig;
        sig.segments = {{0.0, 1}};
        sig.horizon = 1.0;
        Vector x0(4);
        x0 << 1.0, -0.5, 0.0, 0.0;
        Vector exact = linalg::expm(pm.A_p) * x0.head(2);

        auto endpointError = [&](double h) {
            hybridsim::SimulateOptions so;
            so.h = h;
            auto tr = hybridsim::simulate(lti, zero, sig, Disturbance::zero(), x0, 1.0, so);
            return (tr.steps.back().x_p - exact).norm() / exact.norm();
        };
        double e1 = endpointError(1e-3);
        double ratio = endpointError(2e-3) / e1;
        c.pass = e1 <= 1e-6 && ratio >= 12.0 && ratio <= 20.0;
        c.detail = "rel err " + fmt(e1) + " at h=1e-3, halving ratio " + fmt(ratio);
        out.push_back(c);
    }

    // --- ADT diagnostics ----------------------------------------------------
    {
        CriterionResult c{"adt-diagnostics"};
        auto sig = fixtures::benchmarkSignal();
        auto rep = hybridsim::adtStats(sig, 13.86);
        double brute = bruteForceChatter(sig, 13.86);
        bool ok = rep.count == 5 && std::abs(rep.average - 14.0) < 1e-12 &&
                  rep.chatter_bound && std::isfinite(*rep.chatter_bound) &&
                  std::abs(*rep.chatter_bound - brute) < 1e-12;
        c.pass = ok;
        c.detail = "count=" + std::to_string(rep.count) + " avg=" + fmt(rep.average) +
                   " N0*=" + (rep.chatter_bound ? fmt(*rep.chatter_bound) : "n/a") +
                   " brute=" + fmt(brute);
        out.push_back(c);
    }

    // --- SDP unit oracles ---------------------------------------------------
    {
        CriterionResult c{"sdp-unit-oracles"};
        std::mt19937 rng(20240817);
        std::uniform_real_distribution<double> unif(-5.0, 5.0);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            int na = 2 + trial % 5;
            std::vector<double> a(na);
            double amax = -1e18;
            for (double& v : a) {
                v = unif(rng);
                amax = std::max(amax, v);
            }
            std::vector<sdp::SolverBlock> blocks;
            Matrix f0 = Matrix::Zero(na, na);
            Matrix fk = Matrix::Identity(na, na);
            for (int i = 0; i < na; ++i) f0(i, i) = -a[i];
            sdp::SolverBlock b;
            b.f0 = f0;
            b.coeffs.emplace(0, fk);
            blocks.push_back(std::move(b));
            Vector x0 = Vector::Constant(1, amax + 1.0);
            Vector cobj = Vector::Constant(1, 1.0);
            auto res = sdp::minimizeLinear(blocks, cobj, x0);
            double err = std::abs(res.x(0) - amax) / std::max(1.0, std::abs(amax));
            worst = std::max(worst, err);
            if (!res.feasible() || err > 1e-8) ok = false;
        }
        // contradictory scalars: x >= 1 and -x >= 0
        std::vector<sdp::SolverBlock> bad(2);
        bad[0].f0 = Matrix::Constant(1, 1, -1.0);
        bad[0].coeffs.emplace(0, Matrix::Constant(1, 1, 1.0));
        bad[1].f0 = Matrix::Zero(1, 1);
        bad[1].coeffs.emplace(0, Matrix::Constant(1, 1, -1.0));
        auto infeas = sdp::solveFeasibilityBlocks(bad, 1);
        ok = ok && infeas.status == sdp::SolveStatus::Infeasible;
        c.pass = ok;
        c.detail = "max |t* - max a_i| rel " + fmt(worst) + "; contradictory pair -> " +
                   sdp::to_string(infeas.status);
        out.push_back(c);
    }

    return out;
}

std::string formatResults(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const auto& r : results)
        os << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << "  " << r.name << ": "
           << r.detail << "\n";
    os << (allPassed(results) ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
    return os.str();
}

std::string resultsJson(const std::vector<CriterionResult>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results)
        j.push_back({{"name", r.name},
                     {"pass", r.pass},
                     {"skipped", r.skipped},
                     {"detail", r.detail}});
    return j.dump(2) + "\n";
}

bool allPassed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass && !r.skipped) return false;
    return true;
}

}  // namespace satsw::accept
