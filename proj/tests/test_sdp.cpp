#include <doctest.h>

#include <random>

#include "satsw/fixtures.hpp"
#include "satsw/sdp.hpp"

using namespace satsw;
using sdp::SolverBlock;

namespace {

SolverBlock scalarBlock(double f0, int coord, double coeff) {
    SolverBlock b;
    b.f0 = Matrix::Constant(1, 1, f0);
    b.coeffs[coord] = Matrix::Constant(1, 1, coeff);
    return b;
}

lmi::LmiProgram benchmarkProgram(double lambda0, double mu,
                                 GammaMode mode = GammaMode::Minimize,
                                 double gamma = 1.0) {
    SynthesisSpec spec;
    spec.lambda0 = lambda0;
    spec.mu = mu;
    spec.gamma_mode = mode;
    spec.gamma_fixed = gamma;
    return lmi::buildProgram(fixtures::benchmarkPlant(), spec);
}

constexpr double kEps = 7e-6;   // 1e-6 * (1 + max benchmark entry)
constexpr double kDelta = 1e-8;

}  // namespace

TEST_CASE("scalar feasibility") {
    // x - 1 >= 0
    auto out = sdp::solveFeasibilityBlocks({scalarBlock(-1.0, 0, 1.0)}, 1);
    CHECK(out.feasible());
    CHECK(out.phase1_tau < 0.0);
    CHECK(out.x(0) >= 1.0);
}

TEST_CASE("contradictory constraints are infeasible") {
    // x - 1 >= 0 and -x >= 0
    auto out = sdp::solveFeasibilityBlocks(
        {scalarBlock(-1.0, 0, 1.0), scalarBlock(0.0, 0, -1.0)}, 1);
    CHECK(out.status == sdp::SolveStatus::Infeasible);
    CHECK_FALSE(out.feasible());
}

TEST_CASE("constant indefinite block is infeasible") {
    // [1, 2; 2, 1] has eigenvalue -1 and no variables to fix it
    SolverBlock b;
    b.f0 = Matrix(2, 2);
    b.f0 << 1, 2, 2, 1;
    auto out = sdp::solveFeasibilityBlocks({b}, 1);
    CHECK(out.status == sdp::SolveStatus::Infeasible);
}

TEST_CASE("minimizeLinear pinned optimum") {
    // min t s.t. t >= 1 and t >= 3
    std::vector<SolverBlock> blocks = {scalarBlock(-1.0, 0, 1.0), scalarBlock(-3.0, 0, 1.0)};
    Vector c = Vector::Constant(1, 1.0);
    Vector x0 = Vector::Constant(1, 5.0);
    auto out = sdp::minimizeLinear(blocks, c, x0);
    CHECK(out.feasible());
    CHECK(out.objective == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("minimizeLinear random max oracle") {
    std::mt19937 rng(915);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SolverBlock> blocks;
        double best = -1e18;
        for (int k = 0; k < 6; ++k) {
            double a = u(rng);
            best = std::max(best, a);
            blocks.push_back(scalarBlock(-a, 0, 1.0));
        }
        Vector c = Vector::Constant(1, 1.0);
        Vector x0 = Vector::Constant(1, best + 1.0);
        auto out = sdp::minimizeLinear(blocks, c, x0);
        CHECK(out.feasible());
        CHECK(std::abs(out.objective - best) <= 1e-7 * (1.0 + std::abs(best)));
    }
}

TEST_CASE("tightenedBlocks senses") {
    auto prog = benchmarkProgram(0.1, 4.0);
    auto blocks = sdp::tightenedBlocks(prog, kEps, kDelta);
    REQUIRE(blocks.size() == prog.constraints.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& c = prog.constraints[i];
        const Matrix I = Matrix::Identity(c.matrix.rows(), c.matrix.rows());
        Matrix expect;
        switch (c.sense) {
            case lmi::Sense::StrictNeg: expect = -c.matrix.f0() - kEps * I; break;
            case lmi::Sense::StrictPos: expect = c.matrix.f0() - kEps * I; break;
            case lmi::Sense::Psd: expect = c.matrix.f0() - kDelta * I; break;
        }
        CHECK((blocks[i].f0 - expect).norm() < 1e-14);
    }
}

TEST_CASE("benchmark synthesis values") {
    SUBCASE("lambda0 = 0.05, mu = 3.8") {
        auto out = sdp::minimizeGamma(benchmarkProgram(0.05, 3.8), kEps, kDelta);
        CHECK(out.feasible());
        CHECK(std::abs(out.gamma - 0.4574) / 0.4574 < 0.02);
    }
    SUBCASE("lambda0 = 0.1, mu = 4.2") {
        auto out = sdp::minimizeGamma(benchmarkProgram(0.1, 4.2), kEps, kDelta);
        CHECK(out.feasible());
        CHECK(std::abs(out.gamma - 0.4951) / 0.4951 < 0.02);
    }
}

TEST_CASE("fixed-gamma feasibility bracketing the optimum") {
    auto feas = sdp::solveFeasibility(benchmarkProgram(0.1, 4.0, GammaMode::Fixed, 0.75),
                                      kEps, kDelta);
    CHECK(feas.feasible());
    for (const auto& m : feas.margins) CHECK(m.lambda_min >= -2.0 * kDelta);

    auto infeas = sdp::solveFeasibility(benchmarkProgram(0.1, 4.0, GammaMode::Fixed, 0.1),
                                        kEps, kDelta);
    CHECK(infeas.status == sdp::SolveStatus::Infeasible);
}

TEST_CASE("bisectGamma") {
    auto builder = [](double gamma) {
        return benchmarkProgram(0.1, 4.0, GammaMode::Fixed, gamma);
    };
    SUBCASE("matches direct minimization") {
        auto direct = sdp::minimizeGamma(benchmarkProgram(0.1, 4.0), kEps, kDelta);
        auto bis = sdp::bisectGamma(builder, kEps, kDelta);
        CHECK(bis.feasible());
        CHECK_FALSE(bis.bracket_not_tight);
        CHECK(std::abs(bis.gamma - direct.gamma) < 1e-2 * direct.gamma);
    }
    SUBCASE("feasible lower endpoint flags a loose bracket") {
        sdp::SolverOptions opts;
        opts.gamma_lo = 10.0;
        opts.gamma_hi = 20.0;
        auto out = sdp::bisectGamma(builder, kEps, kDelta, opts);
        CHECK(out.feasible());
        CHECK(out.bracket_not_tight);
        CHECK(out.gamma == doctest::Approx(10.0));
    }
    SUBCASE("infeasible upper endpoint") {
        sdp::SolverOptions opts;
        opts.gamma_lo = 0.01;
        opts.gamma_hi = 0.1;
        auto out = sdp::bisectGamma(builder, kEps, kDelta, opts);
        CHECK(out.status == sdp::SolveStatus::Infeasible);
    }
}

TEST_CASE("determinism") {
    auto a = sdp::minimizeGamma(benchmarkProgram(0.1, 4.0), kEps, kDelta);
    auto b = sdp::minimizeGamma(benchmarkProgram(0.1, 4.0), kEps, kDelta);
    REQUIRE(a.feasible());
    CHECK(a.gamma == b.gamma);
    CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("gamma cap turns minimization into a capped solve") {
    sdp::SolverOptions opts;
    opts.gamma_cap = 2.0;
    auto out = sdp::minimizeGamma(benchmarkProgram(0.1, 4.0), kEps, kDelta, opts);
    CHECK(out.feasible());
    CHECK(out.gamma <= 2.0 + 1e-6);
}
