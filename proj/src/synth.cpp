#include "satsw/synth.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "satsw/errors.hpp"

namespace satsw::synth {

namespace {

std::string tag(const char* base, int i) {
    return std::string(base) + "(" + std::to_string(i) + ")";
}
std::string tag(const char* base, int i, int j) {
    return std::string(base) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

struct ModeAssignment {
    Matrix R, S, U, Ah, Bh1, Bh2, Ch1, Dh11, Dh12, Hh1, Hh2;
    linalg::Factorization MN;  // I - R S = M N^T
};

ModeAssignment modeAssignment(const lmi::LmiProgram& program, const Vector& x, int i) {
    const auto& reg = program.registry;
    ModeAssignment a;
    a.R = reg.value(tag("R", i), x);
    a.S = reg.value(tag("S", i), x);
    a.U = reg.value(tag("U", i), x);
    a.Ah = reg.value(tag("Ah", i), x);
    a.Bh1 = reg.value(tag("Bh1", i), x);
    a.Bh2 = reg.value(tag("Bh2", i), x);
    a.Ch1 = reg.value(tag("Ch1", i), x);
    a.Dh11 = reg.value(tag("Dh11", i), x);
    a.Dh12 = reg.value(tag("Dh12", i), x);
    a.Hh1 = reg.value(tag("Hh1", i), x);
    a.Hh2 = reg.value(tag("Hh2", i), x);
    Matrix X = Matrix::Identity(a.R.rows(), a.R.cols()) - a.R * a.S;
    a.MN = linalg::balancedFactorize(X, linalg::defaultSigmaTol(X));
    return a;
}

Matrix z1Of(const ModeAssignment& a) {
    const int n = static_cast<int>(a.R.rows());
    Matrix z1(2 * n, 2 * n);
    z1 << a.R, Matrix::Identity(n, n), a.MN.m.transpose(), Matrix::Zero(n, n);
    return z1;
}

/// The proof's dissipation matrix for one mode.
Matrix dissipationMatrix(const PlantMode& pm, const ControllerMode& cm, double lambda0,
                         double gamma) {
    ClosedLoopMode cl = assembleClosedLoop(pm, cm);
    const int n2 = static_cast<int>(cl.A_cl.rows());
    const int nu = static_cast<int>(cl.B_cl0.cols());
    const int nw = static_cast<int>(cl.B_cl2.cols());
    const int nz = static_cast<int>(cl.C_cl2.rows());
    Matrix ui = linalg::guardedInverse(cm.U);
    Matrix h(nu, n2);
    h << cm.H1, cm.H2;
    Matrix m = Matrix::Zero(n2 + nu + nw + nz, n2 + nu + nw + nz);
    m.block(0, 0, n2, n2) = linalg::he(cm.P * cl.A_cl) + lambda0 * cm.P;
    m.block(n2, 0, nu, n2) = cl.B_cl0.transpose() * cm.P + ui * (cl.C_cl0 - h);
    m.block(n2, n2, nu, nu) = linalg::he(ui * (cl.D_cl00 - Matrix::Identity(nu, nu)));
    m.block(n2 + nu, 0, nw, n2) = cl.B_cl2.transpose() * cm.P;
    m.block(n2 + nu, n2, nw, nu) = cl.D_cl02.transpose() * ui;
    m.block(n2 + nu, n2 + nu, nw, nw) = -Matrix::Identity(nw, nw);
    m.block(n2 + nu + nw, 0, nz, n2) = cl.C_cl2;
    m.block(n2 + nu + nw, n2, nz, nu) = cl.D_cl20;
    m.block(n2 + nu + nw, n2 + nu, nz, nw) = cl.D_cl22;
    m.block(n2 + nu + nw, n2 + nu + nw, nz, nz) = -gamma * gamma * Matrix::Identity(nz, nz);
    Matrix lower = m;
    return lower.triangularView<Eigen::Lower>().toDenseMatrix() +
           Matrix(lower.triangularView<Eigen::StrictlyLower>().toDenseMatrix()).transpose();
}

}  // namespace

const Matrix& HybridController::reset(int i, int j) const {
    auto it = resets.find({i, j});
    if (it == resets.end())
        throw UnknownId("no reset map for pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
    return it->second;
}

void HybridController::checkDimensions(const SwitchedPlant& plant) const {
    const int n = plant.n(), nu = plant.nu(), ny = plant.ny();
    if (numModes() != plant.numModes())
        throw DimensionMismatch("controller/plant mode count mismatch");
    for (const auto& m : modes) {
        if (m.A_k.rows() != n || m.A_k.cols() != n || m.B_k1.rows() != n ||
            m.B_k1.cols() != ny || m.B_k2.rows() != n || m.B_k2.cols() != nu ||
            m.C_k1.rows() != nu || m.C_k1.cols() != n || m.D_k11.rows() != nu ||
            m.D_k11.cols() != ny || m.D_k12.rows() != nu || m.D_k12.cols() != nu)
            throw DimensionMismatch("controller mode has inconsistent shapes");
        if (m.H1.size() > 0 && (m.H1.rows() != nu || m.H1.cols() != n))
            throw DimensionMismatch("H1 shape mismatch");
        if (m.P.size() > 0 && (m.P.rows() != 2 * n || m.P.cols() != 2 * n))
            throw DimensionMismatch("P shape mismatch");
    }
    for (const auto& [ij, d] : resets)
        if (d.rows() != n || d.cols() != n) throw DimensionMismatch("reset map shape mismatch");
}

std::string CertificateReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < dissipation_lambda_max.size(); ++i)
        os << "mode " << i + 1 << ": dissipation lambda_max = " << dissipation_lambda_max[i]
           << ", P lambda_min = " << p_lambda_min[i] << "\n";
    for (const auto& [ij, lam] : boundary_lambda_min)
        os << "boundary (" << ij.first << "->" << ij.second << "): lambda_min = " << lam << "\n";
    for (std::size_t i = 0; i < inclusion_slack.size(); ++i)
        for (std::size_t m = 0; m < inclusion_slack[i].size(); ++m)
            os << "inclusion mode " << i + 1 << " channel " << m + 1
               << ": slack = " << inclusion_slack[i][m] << "\n";
    os << (pass ? "PASS" : "FAIL");
    return os.str();
}

HybridController reconstruct(const Vector& assignment, const lmi::LmiProgram& program,
                             const SwitchedPlant& plant, const SynthesisSpec& spec,
                             double gamma) {
    const int n = plant.n(), nu = plant.nu(), ny = plant.ny();
    HybridController ctrl;
    ctrl.gamma = gamma;
    ctrl.lambda0 = spec.lambda0;
    ctrl.mu = spec.mu;
    ctrl.s = spec.s;
    ctrl.tau_a_star = dwellTimeBound(spec.lambda0, spec.mu);

    std::vector<ModeAssignment> av;
    for (int i = 1; i <= program.numModes; ++i)
        av.push_back(modeAssignment(program, assignment, i));

    for (int i = 0; i < program.numModes; ++i) {
        const auto& a = av[i];
        const auto& pm = plant.modes[i];
        const Matrix& M = a.MN.m;
        const Matrix& N = a.MN.n;

        Matrix left(n + nu, n + nu);
        left << N, a.S * pm.B_p2, Matrix::Zero(nu, n), Matrix::Identity(nu, nu);
        Matrix mid(n + nu, n + nu + ny);
        mid << a.Ah - a.S * pm.A_p * a.R, a.Bh2 + a.S * pm.B_p2 * a.U, a.Bh1,
            a.Ch1, a.Dh12, a.Dh11;
        Matrix right(n + nu + ny, n + nu + ny);
        right << M.transpose(), Matrix::Zero(n, nu), Matrix::Zero(n, ny),
            Matrix::Zero(nu, n), a.U, Matrix::Zero(nu, ny),
            pm.C_p2 * a.R, Matrix::Zero(ny, nu), Matrix::Identity(ny, ny);
        Matrix k = linalg::guardedInverse(left) * mid * linalg::guardedInverse(right);

        ControllerMode cm;
        cm.A_k = k.block(0, 0, n, n);
        cm.B_k2 = k.block(0, n, n, nu);
        cm.B_k1 = k.block(0, n + nu, n, ny);
        cm.C_k1 = k.block(n, 0, nu, n);
        cm.D_k12 = k.block(n, n, nu, nu);
        cm.D_k11 = k.block(n, n + nu, nu, ny);
        cm.U = a.U;

        Matrix t(2 * n, 2 * n);  // [I, R; 0, M^T]
        t << Matrix::Identity(n, n), a.R, Matrix::Zero(n, n), M.transpose();
        Matrix hh(nu, 2 * n);
        hh << a.Hh1, a.Hh2;
        Matrix h = hh * linalg::guardedInverse(t);
        cm.H1 = h.block(0, 0, nu, n);
        cm.H2 = h.block(0, n, nu, n);

        Matrix z1 = z1Of(a);
        Matrix z2(2 * n, 2 * n);
        z2 << Matrix::Identity(n, n), a.S, Matrix::Zero(n, n), N.transpose();
        Matrix p = z2 * linalg::guardedInverse(z1);
        cm.P = 0.5 * (p + p.transpose());
        if (linalg::symEigBounds(cm.P).first <= 0.0)
            throw NearSingular("reconstruct: P not positive definite for mode " +
                                   std::to_string(i + 1),
                               linalg::symEigBounds(cm.P).first);
        ctrl.modes.push_back(std::move(cm));
    }

    for (const auto& name : program.registry.names()) {
        if (name.rfind("Del(", 0) != 0) continue;
        int i = 0, j = 0;
        if (std::sscanf(name.c_str(), "Del(%d,%d)", &i, &j) != 2) continue;
        Matrix dh = program.registry.value(name, assignment);
        const auto& ai = av[i - 1];
        const auto& aj = av[j - 1];
        Matrix delta = linalg::guardedInverse(aj.MN.n) * (dh - aj.S * ai.R) *
                       linalg::guardedInverse(Matrix(ai.MN.m.transpose()));
        ctrl.resets.emplace(std::make_pair(i, j), std::move(delta));
    }
    return ctrl;
}

ClosedLoopMode assembleClosedLoop(const PlantMode& pm, const ControllerMode& cm) {
    const int n = static_cast<int>(pm.A_p.rows());
    const int nk = static_cast<int>(cm.A_k.rows());
    const int nu = static_cast<int>(pm.B_p2.cols());
    const int nw = static_cast<int>(pm.B_p1.cols());
    const int nz = static_cast<int>(pm.C_p1.rows());
    if (cm.C_k1.cols() != nk || cm.B_k1.rows() != nk || pm.C_p2.cols() != n ||
        cm.D_k11.rows() != nu)
        throw DimensionMismatch("assembleClosedLoop: incompatible shapes");

    ClosedLoopMode cl;
    cl.A_cl = Matrix::Zero(n + nk, n + nk);
    cl.A_cl << pm.A_p + pm.B_p2 * cm.D_k11 * pm.C_p2, pm.B_p2 * cm.C_k1,
        cm.B_k1 * pm.C_p2, cm.A_k;
    cl.B_cl0 = Matrix::Zero(n + nk, nu);
    cl.B_cl0 << pm.B_p2 * cm.D_k12 - pm.B_p2, cm.B_k2;
    cl.B_cl2 = Matrix::Zero(n + nk, nw);
    cl.B_cl2 << pm.B_p1 + pm.B_p2 * cm.D_k11 * pm.D_p21, cm.B_k1 * pm.D_p21;
    cl.C_cl0 = Matrix::Zero(nu, n + nk);
    cl.C_cl0 << cm.D_k11 * pm.C_p2, cm.C_k1;
    cl.D_cl00 = cm.D_k12;
    cl.D_cl02 = cm.D_k11 * pm.D_p21;
    cl.C_cl2 = Matrix::Zero(nz, n + nk);
    cl.C_cl2 << pm.C_p1 + pm.D_p12 * cm.D_k11 * pm.C_p2, pm.D_p12 * cm.C_k1;
    cl.D_cl20 = -pm.D_p12 + pm.D_p12 * cm.D_k12;
    cl.D_cl22 = pm.D_p11 + pm.D_p12 * cm.D_k11 * pm.D_p21;
    return cl;
}

CertificateReport verifyCertificate(const HybridController& ctrl, const SwitchedPlant& plant,
                                    double delta) {
    plant.checkDimensions();
    ctrl.checkDimensions(plant);
    CertificateReport rep;
    const int n = plant.n(), nu = plant.nu();
    bool ok = true;

    for (int i = 0; i < ctrl.numModes(); ++i) {
        const auto& cm = ctrl.modes[i];
        double lam = linalg::symEigBounds(
                         dissipationMatrix(plant.modes[i], cm, ctrl.lambda0, ctrl.gamma))
                         .second;
        rep.dissipation_lambda_max.push_back(lam);
        double plam = linalg::symEigBounds(cm.P).first;
        rep.p_lambda_min.push_back(plam);
        ok = ok && lam < 0.0 && plam > 0.0;

        Matrix h(nu, 2 * n);
        h << cm.H1, cm.H2;
        Matrix pinv = linalg::guardedInverse(cm.P);
        std::vector<double> slack;
        for (int m = 0; m < nu; ++m) {
            Vector hm = h.row(m).transpose();
            double sup = ctrl.s * std::sqrt(std::max(0.0, hm.dot(pinv * hm)));
            double sl = plant.u_bar(m) - sup;
            slack.push_back(sl);
            ok = ok && sl >= -delta * plant.u_bar(m);
        }
        rep.inclusion_slack.push_back(std::move(slack));
    }

    for (const auto& [ij, d] : ctrl.resets) {
        const auto& pi = ctrl.modes[ij.first - 1].P;
        const auto& pj = ctrl.modes[ij.second - 1].P;
        Matrix as = Matrix::Zero(2 * n, 2 * n);
        as.block(0, 0, n, n) = Matrix::Identity(n, n);
        as.block(n, n, n, n) = d;
        Matrix b(4 * n, 4 * n);
        b << ctrl.mu * pi, (pj * as).transpose(), pj * as, pj;
        double lam = linalg::symEigBounds(b).first;
        rep.boundary_lambda_min[ij] = lam;
        ok = ok && lam >= -delta;
    }
    rep.pass = ok;
    return rep;
}

double dwellTimeBound(double lambda0, double mu) {
    if (!(lambda0 > 0.0)) throw DomainError("dwellTimeBound: lambda0 must be positive");
    if (!(mu > 1.0)) throw DomainError("dwellTimeBound: mu must exceed 1");
    return std::log(mu) / lambda0;
}

std::vector<HattedVars> rederiveHatted(const HybridController& ctrl,
                                       const SwitchedPlant& plant, const Vector& assignment,
                                       const lmi::LmiProgram& program) {
    const int n = plant.n(), nu = plant.nu(), ny = plant.ny();
    std::vector<ModeAssignment> av;
    for (int i = 1; i <= program.numModes; ++i)
        av.push_back(modeAssignment(program, assignment, i));

    std::vector<HattedVars> out(ctrl.numModes());
    for (int i = 0; i < ctrl.numModes(); ++i) {
        const auto& a = av[i];
        const auto& cm = ctrl.modes[i];
        const auto& pm = plant.modes[i];
        Matrix k(n + nu, n + nu + ny);
        k << cm.A_k, cm.B_k2, cm.B_k1, cm.C_k1, cm.D_k12, cm.D_k11;
        Matrix left(n + nu, n + nu);
        left << a.MN.n, a.S * pm.B_p2, Matrix::Zero(nu, n), Matrix::Identity(nu, nu);
        Matrix right(n + nu + ny, n + nu + ny);
        right << a.MN.m.transpose(), Matrix::Zero(n, nu), Matrix::Zero(n, ny),
            Matrix::Zero(nu, n), cm.U, Matrix::Zero(nu, ny),
            pm.C_p2 * a.R, Matrix::Zero(ny, nu), Matrix::Identity(ny, ny);
        Matrix mid = left * k * right;
        auto& h = out[i];
        h.Ah = mid.block(0, 0, n, n) + a.S * pm.A_p * a.R;
        h.Bh2 = mid.block(0, n, n, nu) - a.S * pm.B_p2 * cm.U;
        h.Bh1 = mid.block(0, n + nu, n, ny);
        h.Ch1 = mid.block(n, 0, nu, n);
        h.Dh12 = mid.block(n, n, nu, nu);
        h.Dh11 = mid.block(n, n + nu, nu, ny);
        Matrix t(2 * n, 2 * n);
        t << Matrix::Identity(n, n), a.R, Matrix::Zero(n, n), a.MN.m.transpose();
        Matrix hcat(nu, 2 * n);
        hcat << cm.H1, cm.H2;
        Matrix hh = hcat * t;
        h.Hh1 = hh.block(0, 0, nu, n);
        h.Hh2 = hh.block(0, n, nu, n);
    }
    for (const auto& [ij, d] : ctrl.resets) {
        const auto& ai = av[ij.first - 1];
        const auto& aj = av[ij.second - 1];
        out[ij.first - 1].DeltaHat[ij] =
            aj.S * ai.R + aj.MN.n * d * ai.MN.m.transpose();
    }
    return out;
}

std::vector<double> congruenceResidual(const HybridController& ctrl,
                                       const SwitchedPlant& plant,
                                       const lmi::LmiProgram& program,
                                       const Vector& assignment) {
    const int nw = plant.nw(), nz = plant.nz(), nu = plant.nu(), n = plant.n();
    std::vector<double> out;
    for (int i = 0; i < ctrl.numModes(); ++i) {
        ModeAssignment a = modeAssignment(program, assignment, i + 1);
        Matrix z1 = z1Of(a);
        Matrix cong = Matrix::Zero(2 * n + nu + nw + nz, 2 * n + nu + nw + nz);
        cong.block(0, 0, 2 * n, 2 * n) = z1;
        cong.block(2 * n, 2 * n, nu, nu) = ctrl.modes[i].U;
        cong.block(2 * n + nu, 2 * n + nu, nw, nw) = Matrix::Identity(nw, nw);
        cong.block(2 * n + nu + nw, 2 * n + nu + nw, nz, nz) = Matrix::Identity(nz, nz);
        Matrix dissip =
            dissipationMatrix(plant.modes[i], ctrl.modes[i], ctrl.lambda0, ctrl.gamma);
        Matrix lhs = cong.transpose() * dissip * cong;
        Matrix rhs = lmi::evaluateConstraint(program, "Perf(" + std::to_string(i + 1) + ")",
                                             assignment);
        double denom = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        out.push_back((lhs - rhs).cwiseAbs().maxCoeff() / denom);
    }
    return out;
}

}  // namespace satsw::synth
