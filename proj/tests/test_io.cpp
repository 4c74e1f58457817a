#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "satsw/errors.hpp"
#include "satsw/fixtures.hpp"
#include "satsw/hybridsim.hpp"
#include "satsw/io.hpp"

using namespace satsw;

namespace {

std::string tempPath(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("plant JSON round trip") {
    SwitchedPlant p = fixtures::benchmarkPlant();
    std::string path = tempPath("satsw_test_plant.json");
    io::savePlant(p, path);
    SwitchedPlant q = io::loadPlant(path);
    REQUIRE(q.numModes() == p.numModes());
    for (int i = 0; i < p.numModes(); ++i) {
        CHECK((q.modes[i].A_p - p.modes[i].A_p).norm() == 0.0);
        CHECK((q.modes[i].B_p2 - p.modes[i].B_p2).norm() == 0.0);
        CHECK((q.modes[i].C_p2 - p.modes[i].C_p2).norm() == 0.0);
        CHECK((q.modes[i].D_p21 - p.modes[i].D_p21).norm() == 0.0);
    }
    CHECK((q.u_bar - p.u_bar).norm() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("plant parse errors") {
    CHECK_THROWS_AS(io::parsePlant("{not json"), ParseError);
    CHECK_THROWS_AS(io::parsePlant("{\"u_bar\": [1.0]}"), ParseError);
    CHECK_THROWS_AS(io::parsePlant(R"({"modes": [{"A_p": [[0]]}], "u_bar": [1]})"),
                    ParseError);  // missing matrices
    CHECK_THROWS_AS(io::parsePlant(R"({"modes": [{"A_p": [0]}], "u_bar": [1]})"),
                    ParseError);  // flat array instead of nested
}

TEST_CASE("spec JSON round trip") {
    SynthesisSpec s;
    s.lambda0 = 0.05;
    s.mu = 3.8;
    s.s = 0.42;
    s.kappa = 1e4;
    std::string path = tempPath("satsw_test_spec.json");
    io::saveSpec(s, path);
    SynthesisSpec t = io::loadSpec(path);
    CHECK(t.lambda0 == s.lambda0);
    CHECK(t.mu == s.mu);
    CHECK(t.s == s.s);
    CHECK(t.gamma_mode == GammaMode::Minimize);
    REQUIRE(t.kappa.has_value());
    CHECK(*t.kappa == 1e4);

    SUBCASE("fixed gamma survives the round trip") {
        s.gamma_mode = GammaMode::Fixed;
        s.gamma_fixed = 0.75;
        io::saveSpec(s, path);
        SynthesisSpec u = io::loadSpec(path);
        CHECK(u.gamma_mode == GammaMode::Fixed);
        CHECK(u.gamma_fixed == 0.75);
    }
    SUBCASE("null gamma means minimize") {
        SynthesisSpec u = io::parseSpec(
            R"({"lambda0": 0.1, "mu": 4.0, "s": 0.42, "gamma": null})");
        CHECK(u.gamma_mode == GammaMode::Minimize);
    }
    CHECK_THROWS_AS(io::parseSpec(R"({"mu": 4.0, "s": 0.42})"), ParseError);
    CHECK_THROWS_AS(io::parseSpec(R"({"lambda0": 0.1, "mu": 0.5, "s": 0.42})"),
                    DomainError);
    std::filesystem::remove(path);
}

TEST_CASE("signal JSON round trip") {
    SwitchingSignal sig = fixtures::benchmarkSignal();
    std::string path = tempPath("satsw_test_signal.json");
    io::saveSignal(sig, path);
    SwitchingSignal t = io::loadSignal(path);
    CHECK(t.horizon == sig.horizon);
    CHECK(t.segments == sig.segments);
    CHECK_THROWS_AS(io::parseSignal(R"({"segments": [[0, 1, 9]], "horizon": 10})"),
                    ParseError);
    CHECK_THROWS_AS(io::parseSignal(R"({"horizon": 10})"), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("controller JSON round trip") {
    synth::HybridController c = fixtures::publishedController();
    std::string path = tempPath("satsw_test_controller.json");
    io::saveController(c, path);
    synth::HybridController d = io::loadController(path);
    REQUIRE(d.numModes() == 2);
    CHECK(d.gamma == c.gamma);
    CHECK(d.lambda0 == c.lambda0);
    CHECK(d.mu == c.mu);
    CHECK(d.s == c.s);
    CHECK(d.tau_a_star == c.tau_a_star);
    for (int i = 0; i < 2; ++i) {
        CHECK((d.modes[i].A_k - c.modes[i].A_k).norm() == 0.0);
        CHECK((d.modes[i].C_k1 - c.modes[i].C_k1).norm() == 0.0);
        CHECK(d.modes[i].P.size() == 0);  // optional blocks stay absent
    }
    CHECK((d.reset(1, 2) - c.reset(1, 2)).norm() == 0.0);
    CHECK((d.reset(2, 1) - c.reset(2, 1)).norm() == 0.0);
    CHECK_THROWS_AS(io::parseController(R"({"gamma": 1.0})"), ParseError);
    CHECK_THROWS_AS(
        io::parseController(
            R"({"gamma":1,"lambda0":0.1,"mu":4,"s":0.42,"modes":[],"resets":{"ab":[[1]]}})"),
        ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("disturbance spec grammar") {
    CHECK(io::parseDisturbanceSpec("zero").isZero());
    Disturbance p = io::parseDisturbanceSpec("pulse:0.6,0,0.4");
    CHECK(disturbanceEnergy(p) == doctest::Approx(0.144));
    CHECK_THROWS_AS(io::parseDisturbanceSpec("pulse:abc"), ParseError);
    CHECK_THROWS_AS(io::parseDisturbanceSpec("ramp:1,2"), ParseError);
    CHECK_THROWS_AS(io::parseDisturbanceSpec("file:/nonexistent/w.json"), ParseError);

    SUBCASE("sample files") {
        std::string path = tempPath("satsw_test_dist.json");
        io::writeFile(path, R"({"times": [0.0, 0.5, 1.0], "values": [[1.0], [0.5], [0.0]]})");
        Disturbance d = io::parseDisturbanceSpec("file:" + path);
        CHECK_FALSE(d.isZero());
        CHECK(d.at(0.25)(0) == doctest::Approx(0.75));  // linear interpolation
        std::filesystem::remove(path);
    }
}

TEST_CASE("CSV output") {
    SwitchedPlant plant = fixtures::benchmarkPlant();
    synth::HybridController ctrl;
    for (int i = 0; i < 2; ++i) {
        synth::ControllerMode c;
        c.A_k = Matrix::Zero(3, 3);
        c.B_k1 = Matrix::Zero(3, 1);
        c.B_k2 = Matrix::Zero(3, 1);
        c.C_k1 = Matrix::Zero(1, 3);
        c.D_k11 = Matrix::Zero(1, 1);
        c.D_k12 = Matrix::Zero(1, 1);
        ctrl.modes.push_back(std::move(c));
    }
    ctrl.resets[{1, 2}] = Matrix::Identity(3, 3);
    ctrl.resets[{2, 1}] = Matrix::Identity(3, 3);
    ctrl.lambda0 = 0.1;
    ctrl.mu = 4.0;
    ctrl.s = 0.42;
    ctrl.gamma = 1.0;
    SwitchingSignal sig;
    sig.segments = {{0.0, 1}, {1.0, 2}};
    sig.horizon = 1.5;
    Vector x0 = Vector::Zero(6);
    x0(0) = 0.01;
    hybridsim::SimulateOptions opts;
    opts.h = 1e-2;
    auto trace = hybridsim::simulate(plant, ctrl, sig, Disturbance::zero(), x0, 1.5, opts);

    std::string csv = io::traceCsv(trace);
    CHECK(csv.rfind("t,mode,xp1,xp2,xp3,xk1,xk2,xk3,u1,satu1,w1,z1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(trace.steps.size()) + 1);

    std::string ev = io::eventCsv(trace);
    CHECK(ev.rfind("t,from,to,xk_before1,xk_before2,xk_before3,"
                   "xk_after1,xk_after2,xk_after3\n", 0) == 0);
    CHECK(std::count(ev.begin(), ev.end(), '\n') ==
          static_cast<long>(trace.events.size()) + 1);

    SUBCASE("SVG rendering") {
        std::string svg = io::traceSvg(trace);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("<polyline") != std::string::npos);
        CHECK(svg.find("switching signal") != std::string::npos);
        CHECK(svg.find("sat(u)") != std::string::npos);
    }
}

TEST_CASE("svgLineChart basics") {
    io::Series s;
    s.label = "y";
    for (int i = 0; i <= 10; ++i) {
        s.t.push_back(0.1 * i);
        s.y.push_back(std::sin(0.1 * i));
    }
    std::string svg = io::svgLineChart("test chart", {s});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("test chart") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 5);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("readFile on a missing path throws") {
    CHECK_THROWS_AS(io::readFile("/nonexistent/file.json"), ParseError);
}
