#include <doctest.h>

#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/model.hpp"

using namespace satsw;

namespace {

PlantMode scalarMode(double a, double b2) {
    PlantMode m;
    m.A_p = Matrix::Constant(1, 1, a);
    m.B_p1 = Matrix::Constant(1, 1, 0.5);
    m.B_p2 = Matrix::Constant(1, 1, b2);
    m.C_p1 = Matrix::Constant(1, 1, 1.0);
    m.D_p11 = Matrix::Zero(1, 1);
    m.D_p12 = Matrix::Zero(1, 1);
    m.C_p2 = Matrix::Constant(1, 1, 1.0);
    m.D_p21 = Matrix::Zero(1, 1);
    m.D_p22 = Matrix::Zero(1, 1);
    return m;
}

SwitchedPlant scalarPlant(double a, double b2) {
    SwitchedPlant p;
    p.modes = {scalarMode(a, b2)};
    p.u_bar = Vector::Constant(1, 1.0);
    return p;
}

}  // namespace

TEST_CASE("checkDimensions") {
    SwitchedPlant p = fixtures::benchmarkPlant();
    CHECK_NOTHROW(p.checkDimensions());
    CHECK(p.n() == 3);
    CHECK(p.nu() == 1);
    CHECK(p.nw() == 1);
    CHECK(p.nz() == 1);
    CHECK(p.ny() == 1);

    SUBCASE("mismatched B_p2 across modes") {
        p.modes[1].B_p2 = Matrix::Zero(3, 2);
        CHECK_THROWS_AS(p.checkDimensions(), DimensionMismatch);
    }
    SUBCASE("nonpositive saturation limit") {
        SwitchedPlant q = fixtures::benchmarkPlant();
        q.u_bar(0) = 0.0;
        CHECK_THROWS_AS(q.checkDimensions(), DimensionMismatch);
    }
}

TEST_CASE("maxEntry") {
    SwitchedPlant p = fixtures::benchmarkPlant();
    CHECK(p.maxEntry() == doctest::Approx(6.0));
    CHECK(scalarPlant(-1, 1).maxEntry() == doctest::Approx(1.0));
}

TEST_CASE("validatePlant") {
    SUBCASE("stable scalar mode passes") {
        auto r = validatePlant(scalarPlant(-1.0, 1.0));
        CHECK(r.pass);
        CHECK(r.modes[0].stabilizable);
        CHECK(r.modes[0].detectable);
        CHECK(r.modes[0].unstable_eigenvalues.empty());
    }
    SUBCASE("unstable mode with zero input fails A1") {
        auto r = validatePlant(scalarPlant(0.0, 0.0));
        CHECK_FALSE(r.pass);
        CHECK_FALSE(r.modes[0].stabilizable);
        REQUIRE(r.modes[0].unstable_eigenvalues.size() == 1);
        CHECK(r.modes[0].unstable_eigenvalues[0] == doctest::Approx(0.0));
    }
    SUBCASE("benchmark plant passes") {
        auto r = validatePlant(fixtures::benchmarkPlant());
        CHECK(r.pass);
        for (const auto& m : r.modes) {
            CHECK(m.stabilizable);
            CHECK(m.detectable);
            CHECK(m.feedthrough_zero);
        }
    }
    SUBCASE("nonzero D_p22 throws A2") {
        SwitchedPlant p = scalarPlant(-1.0, 1.0);
        p.modes[0].D_p22 = Matrix::Constant(1, 1, 0.3);
        CHECK_THROWS_AS(validatePlant(p), AssumptionViolated);
    }
}

TEST_CASE("SynthesisSpec check") {
    SynthesisSpec s;
    CHECK_NOTHROW(s.check());
    SUBCASE("mu must exceed 1") {
        s.mu = 1.0;
        CHECK_THROWS_AS(s.check(), DomainError);
    }
    SUBCASE("lambda0 positive") {
        s.lambda0 = 0.0;
        CHECK_THROWS_AS(s.check(), DomainError);
    }
    SUBCASE("s positive") {
        s.s = -0.1;
        CHECK_THROWS_AS(s.check(), DomainError);
    }
    SUBCASE("epsilon must dominate delta when set") {
        s.epsilon = 1e-10;
        s.delta = 1e-8;
        CHECK_THROWS_AS(s.check(), DomainError);
    }
    SUBCASE("scale-aware default epsilon") {
        SynthesisSpec t;
        CHECK(t.effectiveEpsilon(fixtures::benchmarkPlant()) ==
              doctest::Approx(1e-6 * 7.0));
    }
}

TEST_CASE("SwitchingSignal") {
    SwitchingSignal sig;
    sig.segments = {{0.0, 2}, {2.0, 1}, {14.0, 2}};
    sig.horizon = 20.0;
    CHECK_NOTHROW(sig.check(2));
    CHECK(sig.modeAt(0.0) == 2);
    CHECK(sig.modeAt(1.99) == 2);
    CHECK(sig.modeAt(2.0) == 1);
    CHECK(sig.modeAt(19.0) == 2);
    CHECK(sig.switchTimes() == std::vector<double>{2.0, 14.0});

    SUBCASE("must start at zero") {
        sig.segments[0].first = 0.5;
        CHECK_THROWS_AS(sig.check(2), InvalidTimes);
    }
    SUBCASE("times strictly increasing") {
        sig.segments[2].first = 2.0;
        CHECK_THROWS_AS(sig.check(2), InvalidTimes);
    }
    SUBCASE("mode index in range") {
        sig.segments[1].second = 3;
        CHECK_THROWS_AS(sig.check(2), InvalidTimes);
    }
    SUBCASE("horizon beyond last segment") {
        sig.horizon = 10.0;
        CHECK_THROWS_AS(sig.check(2), InvalidTimes);
    }
}

TEST_CASE("disturbanceEnergy") {
    CHECK(disturbanceEnergy(Disturbance::zero()) == 0.0);
    CHECK(disturbanceEnergy(Disturbance::pulse(0.6, 0.0, 0.4)) ==
          doctest::Approx(0.144));
    CHECK(disturbanceEnergy(Disturbance::pulse(1.0, 0.0, 1.0)) == doctest::Approx(1.0));
    SUBCASE("time-shift invariance") {
        CHECK(disturbanceEnergy(Disturbance::pulse(0.6, 3.0, 3.4)) ==
              doctest::Approx(0.144));
    }
    SUBCASE("sampled pulse converges to closed form") {
        double h = 1e-4;
        std::vector<double> times;
        std::vector<Vector> values;
        for (double t = 0.0; t <= 1.0 + 1e-12; t += h) {
            times.push_back(t);
            values.push_back(Vector::Constant(1, (t < 0.4) ? 0.6 : 0.0));
        }
        double e = disturbanceEnergy(Disturbance::samples(times, values));
        CHECK(std::abs(e - 0.144) / 0.144 < 1e-3);
    }
}

TEST_CASE("Disturbance evaluation") {
    auto p = Disturbance::pulse(0.6, 1.0, 1.4);
    CHECK(p.at(0.5)(0) == 0.0);
    CHECK(p.at(1.0)(0) == doctest::Approx(0.6));  // active on [t_on, t_off)
    CHECK(p.at(1.39)(0) == doctest::Approx(0.6));
    CHECK(p.at(1.4)(0) == 0.0);
    CHECK(Disturbance::zero(2).at(3.0).size() == 2);
    CHECK(Disturbance::zero(2).at(3.0).norm() == 0.0);
}
