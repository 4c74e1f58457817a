#include <doctest.h>

#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/sdp.hpp"
#include "satsw/synth.hpp"

using namespace satsw;

namespace {

void setVar(const lmi::VariableRegistry& reg, const std::string& name,
            Eigen::VectorXd& x, const Matrix& val) {
    for (const auto& [coord, basis] : reg.variable(name).coeffs())
        x(coord) = (basis.array() * val.array()).sum() / basis.squaredNorm();
}

SwitchedPlant scalarPlant() {
    PlantMode m;
    m.A_p = Matrix::Constant(1, 1, -1.0);
    m.B_p1 = Matrix::Constant(1, 1, 0.5);
    m.B_p2 = Matrix::Constant(1, 1, 1.0);
    m.C_p1 = Matrix::Constant(1, 1, 1.0);
    m.D_p11 = Matrix::Zero(1, 1);
    m.D_p12 = Matrix::Zero(1, 1);
    m.C_p2 = Matrix::Constant(1, 1, 1.0);
    m.D_p21 = Matrix::Zero(1, 1);
    m.D_p22 = Matrix::Zero(1, 1);
    SwitchedPlant p;
    p.modes = {m, m};
    p.modes[1].A_p(0, 0) = -2.0;
    p.u_bar = Vector::Constant(1, 1.0);
    return p;
}

synth::ControllerMode zeroController(const SwitchedPlant& plant) {
    const int n = plant.n(), nu = plant.nu(), ny = plant.ny();
    synth::ControllerMode c;
    c.A_k = Matrix::Zero(n, n);
    c.B_k1 = Matrix::Zero(n, ny);
    c.B_k2 = Matrix::Zero(n, nu);
    c.C_k1 = Matrix::Zero(nu, n);
    c.D_k11 = Matrix::Zero(nu, ny);
    c.D_k12 = Matrix::Zero(nu, nu);
    return c;
}

struct Synthesized {
    lmi::LmiProgram program;
    sdp::SolveOutcome outcome;
    synth::HybridController ctrl;
};

const Synthesized& headlineSynthesis() {
    static Synthesized s = [] {
        SwitchedPlant plant = fixtures::benchmarkPlant();
        SynthesisSpec spec;  // lambda0 = 0.1, mu = 4, minimize gamma
        Synthesized out{lmi::buildProgram(plant, spec), {}, {}};
        out.outcome = sdp::minimizeGamma(out.program, spec.effectiveEpsilon(plant),
                                         spec.delta);
        REQUIRE(out.outcome.feasible());
        out.ctrl = synth::reconstruct(out.outcome.x, out.program, plant, spec,
                                      out.outcome.gamma);
        return out;
    }();
    return s;
}

}  // namespace

TEST_CASE("dwellTimeBound") {
    CHECK(synth::dwellTimeBound(0.1, 4.0) == doctest::Approx(13.8629).epsilon(1e-4));
    CHECK(synth::dwellTimeBound(0.05, 3.8) == doctest::Approx(26.7027).epsilon(1e-4));
    CHECK(synth::dwellTimeBound(1.0, 1.0 + 1e-12) == doctest::Approx(1e-12).epsilon(1e-3));
    CHECK_THROWS_AS(synth::dwellTimeBound(0.0, 4.0), DomainError);
    CHECK_THROWS_AS(synth::dwellTimeBound(0.1, 1.0), DomainError);
    CHECK_THROWS_AS(synth::dwellTimeBound(0.1, 0.5), DomainError);
}

TEST_CASE("assembleClosedLoop with a zero controller") {
    SwitchedPlant plant = fixtures::benchmarkPlant();
    const auto& pm = plant.modes[0];
    auto cl = synth::assembleClosedLoop(pm, zeroController(plant));
    const int n = plant.n();
    CHECK((cl.A_cl.topLeftCorner(n, n) - pm.A_p).norm() == 0.0);
    CHECK(cl.A_cl.topRightCorner(n, n).norm() == 0.0);
    CHECK(cl.A_cl.bottomRows(n).norm() == 0.0);
    CHECK((cl.B_cl0.topRows(n) + pm.B_p2).norm() == 0.0);
    CHECK(cl.B_cl0.bottomRows(n).norm() == 0.0);
    CHECK((cl.B_cl2.topRows(n) - pm.B_p1).norm() == 0.0);
    CHECK(cl.C_cl0.norm() == 0.0);
    CHECK(cl.D_cl00.norm() == 0.0);
    CHECK((cl.C_cl2.leftCols(n) - pm.C_p1).norm() == 0.0);
    CHECK((cl.D_cl20 + pm.D_p12).norm() == 0.0);
    CHECK((cl.D_cl22 - pm.D_p11).norm() == 0.0);
}

TEST_CASE("assembleClosedLoop static-gain identities") {
    SwitchedPlant plant = fixtures::benchmarkPlant();
    const auto& pm = plant.modes[1];
    auto c = zeroController(plant);
    c.D_k11 = Matrix::Constant(1, 1, -0.4);
    c.D_k12 = Matrix::Constant(1, 1, 0.9);
    auto cl = synth::assembleClosedLoop(pm, c);
    const int n = plant.n();
    CHECK((cl.A_cl.topLeftCorner(n, n) - (pm.A_p + pm.B_p2 * c.D_k11 * pm.C_p2)).norm() <
          1e-14);
    CHECK((cl.D_cl00 - c.D_k12).norm() == 0.0);
    CHECK((cl.C_cl0.leftCols(n) - c.D_k11 * pm.C_p2).norm() < 1e-14);
    CHECK(cl.C_cl0.rightCols(n).norm() == 0.0);
    CHECK((cl.D_cl02 - c.D_k11 * pm.D_p21).norm() < 1e-14);
    CHECK((cl.D_cl22 - (pm.D_p11 + pm.D_p12 * c.D_k11 * pm.D_p21)).norm() < 1e-14);
}

TEST_CASE("reset map vanishes when DeltaHat = S_j R_i") {
    SwitchedPlant plant = scalarPlant();
    SynthesisSpec spec;
    spec.gamma_mode = GammaMode::Fixed;
    spec.gamma_fixed = 1.0;
    lmi::LmiProgram prog = lmi::buildProgram(plant, spec);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.registry.count());
    for (int i = 1; i <= 2; ++i) {
        setVar(prog.registry, "R(" + std::to_string(i) + ")", x,
               Matrix::Constant(1, 1, 0.5));
        setVar(prog.registry, "S(" + std::to_string(i) + ")", x,
               Matrix::Constant(1, 1, 4.0));
        setVar(prog.registry, "U(" + std::to_string(i) + ")", x, Matrix::Identity(1, 1));
    }
    setVar(prog.registry, "Del(1,2)", x, Matrix::Constant(1, 1, 2.0));  // S_j R_i
    setVar(prog.registry, "Del(2,1)", x, Matrix::Constant(1, 1, 2.0));
    auto ctrl = synth::reconstruct(x, prog, plant, spec, 1.0);
    CHECK(ctrl.reset(1, 2).norm() < 1e-12);
    CHECK(ctrl.reset(2, 1).norm() < 1e-12);
    CHECK_THROWS_AS(ctrl.reset(1, 1), UnknownId);
    CHECK_THROWS_AS(ctrl.reset(3, 1), UnknownId);
}

TEST_CASE("headline synthesis reconstruction") {
    const auto& s = headlineSynthesis();
    SwitchedPlant plant = fixtures::benchmarkPlant();

    CHECK(std::abs(s.outcome.gamma - fixtures::kHeadlineGamma) /
              fixtures::kHeadlineGamma < 0.05);
    CHECK(s.ctrl.tau_a_star == doctest::Approx(13.8629).epsilon(1e-4));
    CHECK_NOTHROW(s.ctrl.checkDimensions(plant));

    SUBCASE("Lyapunov matrices are symmetric positive definite") {
        for (const auto& m : s.ctrl.modes) {
            CHECK((m.P - m.P.transpose()).norm() < 1e-12 * m.P.norm());
            auto [lo, hi] = linalg::symEigBounds(m.P);
            CHECK(lo > 0.0);
            CHECK(m.U(0, 0) > 0.0);
        }
    }
    SUBCASE("certificate verifies") {
        auto rep = synth::verifyCertificate(s.ctrl, plant);
        CHECK(rep.pass);
        for (double d : rep.dissipation_lambda_max) CHECK(d < 0.0);
        for (double p : rep.p_lambda_min) CHECK(p > 0.0);
    }
    SUBCASE("congruence identity") {
        auto res = synth::congruenceResidual(s.ctrl, plant, s.program, s.outcome.x);
        for (double r : res) CHECK(r <= 1e-7);
    }
    SUBCASE("hatted variables round-trip") {
        auto hatted = synth::rederiveHatted(s.ctrl, plant, s.outcome.x, s.program);
        for (int i = 0; i < 2; ++i) {
            const std::string k = std::to_string(i + 1);
            auto rel = [&](const Matrix& got, const std::string& name) {
                Matrix want = s.program.registry.value(name, s.outcome.x);
                return (got - want).norm() / (1.0 + want.norm());
            };
            CHECK(rel(hatted[i].Ah, "Ah(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Bh1, "Bh1(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Bh2, "Bh2(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Ch1, "Ch1(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Dh11, "Dh11(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Dh12, "Dh12(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Hh1, "Hh1(" + k + ")") < 1e-8);
            CHECK(rel(hatted[i].Hh2, "Hh2(" + k + ")") < 1e-8);
        }
        int pairsChecked = 0;
        for (const auto& hv : hatted)
            for (const auto& [ij, dh] : hv.DeltaHat) {
                std::string name = "Del(" + std::to_string(ij.first) + "," +
                                   std::to_string(ij.second) + ")";
                Matrix want = s.program.registry.value(name, s.outcome.x);
                CHECK((dh - want).norm() / (1.0 + want.norm()) < 1e-8);
                ++pairsChecked;
            }
        CHECK(pairsChecked == 2);
    }
    SUBCASE("tampered reset map breaks the boundary certificate") {
        auto bad = s.ctrl;
        bad.resets[{1, 2}] *= 1e6;
        auto rep = synth::verifyCertificate(bad, plant);
        CHECK_FALSE(rep.pass);
        CHECK(rep.boundary_lambda_min.at({1, 2}) < -1e-3);
    }
    SUBCASE("understated gamma breaks the dissipation certificate") {
        auto bad = s.ctrl;
        bad.gamma /= 10.0;
        auto rep = synth::verifyCertificate(bad, plant);
        CHECK_FALSE(rep.pass);
        bool anyPositive = false;
        for (double d : rep.dissipation_lambda_max) anyPositive |= (d > 0.0);
        CHECK(anyPositive);
    }
}
