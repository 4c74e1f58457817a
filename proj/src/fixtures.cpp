#include "satsw/fixtures.hpp"

#include <cmath>

#include "satsw/hybridsim.hpp"

namespace satsw::fixtures {

SwitchedPlant benchmarkPlant() {
    SwitchedPlant p;
    PlantMode m1, m2;
    m1.A_p.resize(3, 3);
    m1.A_p << 0.5108, -0.9147, -0.2,
        -0.6563, 0.1798, 0.113,
        0.881, -0.7841, 0.1;
    m2.A_p.resize(3, 3);
    m2.A_p << -0.125, -0.9833, -0.34,
        -0.5305, 0.3848, 0.58,
        1.0306, 0.6521, 0.1;
    m1.B_p1.resize(3, 1);
    m1.B_p1 << 0.1056, 0.1284, 0.1;
    m2.B_p1.resize(3, 1);
    m2.B_p1 << 0.7425, 0.1436, 0.1;
    m1.B_p2.resize(3, 1);
    m1.B_p2 << 0.3257, 1.2963, 2.43;
    m2.B_p2.resize(3, 1);
    m2.B_p2 << 1.0992, 0.6532, 3.5;
    m1.C_p1.resize(1, 3);
    m1.C_p1 << 0.01, 0.06, 0.03;
    m2.C_p1.resize(1, 3);
    m2.C_p1 << 0.01, 0.02, 0.05;
    m1.C_p2.resize(1, 3);
    m1.C_p2 << -5.0, 0.2, 0.5;
    m2.C_p2.resize(1, 3);
    m2.C_p2 << -6.0, 6.0, -1.0;
    for (auto* m : {&m1, &m2}) {
        m->D_p11 = Matrix::Zero(1, 1);
        m->D_p12 = Matrix::Zero(1, 1);
        m->D_p21 = Matrix::Constant(1, 1, 0.1);
        m->D_p22 = Matrix::Zero(1, 1);
    }
    p.modes = {std::move(m1), std::move(m2)};
    p.u_bar = Vector::Constant(1, 1.0);
    return p;
}

synth::HybridController publishedController() {
    synth::HybridController c;
    c.gamma = 0.6953;
    c.lambda0 = 0.1;
    c.mu = 4.0;
    c.s = 0.42;
    c.tau_a_star = std::log(4.0) / 0.1;

    synth::ControllerMode m1, m2;
    m1.A_k.resize(3, 3);
    m1.A_k << -3.6451, -2.2847, 0.093568,
        6.9684, -8.6748, -1.3174,
        107.72, -27.103, -12.288;
    m1.B_k1.resize(3, 1);
    m1.B_k1 << -1.1492, -0.21955, 16.910;
    m1.B_k2.resize(3, 1);
    m1.B_k2 << -8.3909e3, -0.049538, -0.13303;
    m1.C_k1.resize(1, 3);
    m1.C_k1 << 3.8387, -6.3871, -0.87224;
    m1.D_k11 = Matrix::Constant(1, 1, -0.50698);
    m1.D_k12 = Matrix::Constant(1, 1, 0.96418);

    m2.A_k.resize(3, 3);
    m2.A_k << -1.3183e5, 1.6129e5, 298.99,
        1.7675e5, -2.1627e5, -408.46,
        1.0858e6, -1.3286e6, -2.5270e3;
    m2.B_k1.resize(3, 1);
    m2.B_k1 << -2.0805e4, 2.7895e4, 1.7136e5;
    m2.B_k2.resize(3, 1);
    m2.B_k2 << 329.37, -441.71, -2.7137e3;
    m2.C_k1.resize(1, 3);
    m2.C_k1 << -6.6978, 3.3353, -3.8006;
    m2.D_k11 = Matrix::Constant(1, 1, -1.3190);
    m2.D_k12 = Matrix::Constant(1, 1, 0.96738);

    c.modes = {std::move(m1), std::move(m2)};

    Matrix d12(3, 3), d21(3, 3);
    d12 << 0.90789, 0.08393, 4.2385e-3,
        0.10442, 0.90187, -3.9851e-3,
        -0.054297, 0.2453, 0.94581;
    d21 << 0.95265, 0.16426, 0.088899,
        0.063434, 0.77962, -0.11918,
        0.39005, -1.3532, 0.26763;
    c.resets.emplace(std::make_pair(1, 2), std::move(d12));
    c.resets.emplace(std::make_pair(2, 1), std::move(d21));
    return c;
}

SwitchingSignal benchmarkSignal() {
    return hybridsim::cyclicSignal(2.0, 2, 12.0, 1, 2, 50.0, 1, 70.0);
}

std::vector<SweepRow> publishedSweep() {
    return {{0.05, 3.4, 1.7017}, {0.05, 3.8, 0.4574}, {0.05, 4.2, 0.3135},
            {0.1, 3.8, 2.047},   {0.1, 4.2, 0.4951},  {0.1, 4.6, 0.3368},
            {0.12, 4.0, 1.5055}, {0.12, 4.4, 0.4890}};
}

}  // namespace satsw::fixtures
