#include "satsw/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "satsw/errors.hpp"

namespace satsw::lmi {

AffineMatrix AffineMatrix::constant(Matrix m) {
    AffineMatrix a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    a.f0_ = std::move(m);
    return a;
}

void AffineMatrix::addCoeff(int coord, const Matrix& m) {
    if (m.rows() != f0_.rows() || m.cols() != f0_.cols())
        throw DimensionMismatch("addCoeff: coefficient shape mismatch");
    auto it = coeffs_.find(coord);
    if (it == coeffs_.end())
        coeffs_.emplace(coord, m);
    else
        it->second += m;
}

AffineMatrix AffineMatrix::operator+(const AffineMatrix& o) const {
    if (rows() != o.rows() || cols() != o.cols())
        throw DimensionMismatch("AffineMatrix: shape mismatch in addition");
    AffineMatrix r = *this;
    r.f0_ += o.f0_;
    for (const auto& [k, v] : o.coeffs_) r.addCoeff(k, v);
    return r;
}

AffineMatrix AffineMatrix::operator-(const AffineMatrix& o) const { return *this + o * -1.0; }

AffineMatrix AffineMatrix::operator*(double s) const {
    AffineMatrix r = *this;
    r.f0_ *= s;
    for (auto& [k, v] : r.coeffs_) v *= s;
    return r;
}

AffineMatrix AffineMatrix::transpose() const {
    AffineMatrix r(cols(), rows());
    r.f0_ = f0_.transpose();
    for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, v.transpose());
    return r;
}

AffineMatrix AffineMatrix::leftMul(const Matrix& c) const {
    if (c.cols() != rows()) throw DimensionMismatch("leftMul: shape mismatch");
    AffineMatrix r(static_cast<int>(c.rows()), cols());
    r.f0_ = c * f0_;
    for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, c * v);
    return r;
}

AffineMatrix AffineMatrix::rightMul(const Matrix& c) const {
    if (cols() != c.rows()) throw DimensionMismatch("rightMul: shape mismatch");
    AffineMatrix r(rows(), static_cast<int>(c.cols()));
    r.f0_ = f0_ * c;
    for (const auto& [k, v] : coeffs_) r.coeffs_.emplace(k, v * c);
    return r;
}

AffineMatrix AffineMatrix::he() const { return *this + transpose(); }

Matrix AffineMatrix::eval(const Eigen::VectorXd& x) const {
    Matrix m = f0_;
    for (const auto& [k, v] : coeffs_) {
        if (k >= x.size()) throw DimensionMismatch("eval: assignment too short");
        m += x(k) * v;
    }
    return m;
}

AffineMatrix AffineMatrix::block(const std::vector<std::vector<AffineMatrix>>& grid) {
    int rows = 0, cols = 0;
    for (const auto& row : grid) rows += row.at(0).rows();
    for (const auto& m : grid.at(0)) cols += m.cols();
    AffineMatrix out(rows, cols);
    int r0 = 0;
    for (const auto& row : grid) {
        int c0 = 0;
        const int rh = row.at(0).rows();
        for (const auto& m : row) {
            if (m.rows() != rh) throw DimensionMismatch("block: ragged row heights");
            out.f0_.block(r0, c0, m.rows(), m.cols()) = m.f0_;
            for (const auto& [k, v] : m.coeffs_) {
                auto it = out.coeffs_.find(k);
                if (it == out.coeffs_.end())
                    it = out.coeffs_.emplace(k, Matrix::Zero(rows, cols)).first;
                it->second.block(r0, c0, m.rows(), m.cols()) = v;
            }
            c0 += m.cols();
        }
        if (c0 != cols) throw DimensionMismatch("block: ragged column widths");
        r0 += rh;
    }
    return out;
}

AffineMatrix VariableRegistry::addSymmetric(const std::string& name, int d) {
    AffineMatrix m(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            Matrix e = Matrix::Zero(d, d);
            e(a, b) = 1.0;
            e(b, a) = 1.0;
            m.addCoeff(next_++, e);
        }
    vars_.emplace(name, m);
    order_.push_back(name);
    return m;
}

AffineMatrix VariableRegistry::addDiagonal(const std::string& name, int d) {
    AffineMatrix m(d, d);
    for (int a = 0; a < d; ++a) {
        Matrix e = Matrix::Zero(d, d);
        e(a, a) = 1.0;
        m.addCoeff(next_++, e);
    }
    vars_.emplace(name, m);
    order_.push_back(name);
    return m;
}

AffineMatrix VariableRegistry::addFull(const std::string& name, int rows, int cols) {
    AffineMatrix m(rows, cols);
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) {
            Matrix e = Matrix::Zero(rows, cols);
            e(a, b) = 1.0;
            m.addCoeff(next_++, e);
        }
    vars_.emplace(name, m);
    order_.push_back(name);
    return m;
}

AffineMatrix VariableRegistry::addScalar(const std::string& name) { return addFull(name, 1, 1); }

const AffineMatrix& VariableRegistry::variable(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw UnknownId("unknown variable " + name);
    return it->second;
}

Matrix VariableRegistry::value(const std::string& name, const Eigen::VectorXd& x) const {
    return variable(name).eval(x);
}

std::vector<std::string> VariableRegistry::names() const { return order_; }

const LmiConstraint& LmiProgram::find(const std::string& id) const {
    for (const auto& c : constraints)
        if (c.id == id) return c;
    throw UnknownId("unknown constraint " + id);
}

namespace {

std::string tag(const std::string& base, int i) {
    return base + "(" + std::to_string(i) + ")";
}
std::string tag(const std::string& base, int i, int j) {
    return base + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

LmiProgram buildProgram(const SwitchedPlant& plant, const SynthesisSpec& spec,
                        const BuildOptions& opts) {
    plant.checkDimensions();
    spec.check();
    const int Np = plant.numModes();
    const int n = plant.n(), nu = plant.nu(), nw = plant.nw(), nz = plant.nz(),
              ny = plant.ny();

    LmiProgram prog;
    prog.numModes = Np;
    auto& reg = prog.registry;

    struct ModeVars {
        AffineMatrix R, S, U, Ah, Bh1, Bh2, Ch1, Dh11, Dh12, Hh1, Hh2;
    };
    std::vector<ModeVars> v;
    for (int i = 1; i <= Np; ++i) {
        ModeVars mv;
        mv.R = reg.addSymmetric(tag("R", i), n);
        mv.S = reg.addSymmetric(tag("S", i), n);
        mv.U = reg.addDiagonal(tag("U", i), nu);
        mv.Ah = reg.addFull(tag("Ah", i), n, n);
        mv.Bh1 = reg.addFull(tag("Bh1", i), n, ny);
        mv.Bh2 = reg.addFull(tag("Bh2", i), n, nu);
        mv.Ch1 = reg.addFull(tag("Ch1", i), nu, n);
        mv.Dh11 = reg.addFull(tag("Dh11", i), nu, ny);
        mv.Dh12 = reg.addFull(tag("Dh12", i), nu, nu);
        mv.Hh1 = reg.addFull(tag("Hh1", i), nu, n);
        mv.Hh2 = reg.addFull(tag("Hh2", i), nu, n);
        v.push_back(std::move(mv));
    }

    std::vector<std::pair<int, int>> pairs = opts.switching_pairs;
    if (pairs.empty()) {
        for (int i = 1; i <= Np; ++i)
            for (int j = 1; j <= Np; ++j)
                if (i != j) pairs.emplace_back(i, j);
    }
    std::map<std::pair<int, int>, AffineMatrix> del;
    for (const auto& [i, j] : pairs) {
        if (i < 1 || i > Np || j < 1 || j > Np || i == j)
            throw DomainError("invalid boundary pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
        del.emplace(std::make_pair(i, j), reg.addFull(tag("Del", i, j), n, n));
    }

    std::optional<AffineMatrix> tvar;
    if (spec.gamma_mode == GammaMode::Minimize) {
        tvar = reg.addScalar("t");
        prog.t_coord = tvar->coeffs().begin()->first;
    }

    const Matrix In = Matrix::Identity(n, n);
    const double lam0 = spec.lambda0, mu = spec.mu, s = spec.s;

    for (int i = 0; i < Np; ++i) {
        const auto& pm = plant.modes[i];
        const auto& mv = v[i];
        const int k = i + 1;

        auto b11 = (mv.R.leftMul(pm.A_p) + mv.Ch1.leftMul(pm.B_p2)).he() + mv.R * lam0;
        auto b21 = mv.Ah + AffineMatrix::constant(pm.A_p.transpose() + lam0 * In) +
                   mv.Dh11.transpose().leftMul(pm.C_p2.transpose()).rightMul(pm.B_p2.transpose());
        auto b22 = (mv.S.rightMul(pm.A_p) + mv.Bh1.rightMul(pm.C_p2)).he() + mv.S * lam0;
        auto b31 = mv.U.rightMul(pm.B_p2.transpose()) * -1.0 +
                   mv.Dh12.transpose().rightMul(pm.B_p2.transpose()) + mv.Ch1 - mv.Hh2;
        auto b32 = mv.Bh2.transpose() + mv.Dh11.rightMul(pm.C_p2) - mv.Hh1;
        auto b33 = (mv.Dh12 - mv.U).he();
        auto b41 = AffineMatrix::constant(pm.B_p1.transpose()) +
                   mv.Dh11.transpose().leftMul(pm.D_p21.transpose()).rightMul(pm.B_p2.transpose());
        auto b42 = mv.S.leftMul(pm.B_p1.transpose()) +
                   mv.Bh1.transpose().leftMul(pm.D_p21.transpose());
        auto b43 = mv.Dh11.transpose().leftMul(pm.D_p21.transpose());
        auto b44 = AffineMatrix::constant(-Matrix::Identity(nw, nw));
        auto b51 = mv.R.leftMul(pm.C_p1) + mv.Ch1.leftMul(pm.D_p12);
        auto b52 = AffineMatrix::constant(pm.C_p1) +
                   mv.Dh11.leftMul(pm.D_p12).rightMul(pm.C_p2);
        auto b53 = mv.U.leftMul(-pm.D_p12) + mv.Dh12.leftMul(pm.D_p12);
        auto b54 = AffineMatrix::constant(pm.D_p11) +
                   mv.Dh11.leftMul(pm.D_p12).rightMul(pm.D_p21);
        AffineMatrix b55(nz, nz);
        if (tvar) {
            b55.addCoeff(*prog.t_coord, -Matrix::Identity(nz, nz));
        } else {
            b55.addConstant(-spec.gamma_fixed * spec.gamma_fixed * Matrix::Identity(nz, nz));
        }

        auto perf = AffineMatrix::block({
            {b11, b21.transpose(), b31.transpose(), b41.transpose(), b51.transpose()},
            {b21, b22, b32.transpose(), b42.transpose(), b52.transpose()},
            {b31, b32, b33, b43.transpose(), b53.transpose()},
            {b41, b42, b43, b44, b54.transpose()},
            {b51, b52, b53, b54, b55}});
        prog.constraints.push_back({tag("Perf", k), Sense::StrictNeg, std::move(perf)});

        auto coup = AffineMatrix::block({{mv.R, AffineMatrix::constant(In)},
                                         {AffineMatrix::constant(In), mv.S}});
        prog.constraints.push_back({tag("Coupling", k), Sense::StrictPos, std::move(coup)});

        for (int m = 0; m < nu; ++m) {
            Matrix lm = Matrix::Zero(nu, 1);
            lm(m, 0) = 1.0;
            Matrix ub(1, 1);
            ub(0, 0) = plant.u_bar(m) * plant.u_bar(m) / (s * s);
            auto inc = AffineMatrix::block({
                {AffineMatrix::constant(ub), mv.Hh2.leftMul(lm.transpose()),
                 mv.Hh1.leftMul(lm.transpose())},
                {mv.Hh2.transpose().rightMul(lm), mv.R, AffineMatrix::constant(In)},
                {mv.Hh1.transpose().rightMul(lm), AffineMatrix::constant(In), mv.S}});
            prog.constraints.push_back({tag("Inclusion", k, m + 1), Sense::Psd, std::move(inc)});
        }

        if (spec.kappa) {
            const double kap = *spec.kappa;
            const std::pair<std::string, const AffineMatrix*> bounded[] = {
                {"Ah", &mv.Ah}, {"Bh1", &mv.Bh1}, {"Ch1", &mv.Ch1}, {"Dh12", &mv.Dh12}};
            for (const auto& [nm, vv] : bounded) {
                auto gb = AffineMatrix::block(
                    {{AffineMatrix::constant(kap * Matrix::Identity(vv->rows(), vv->rows())), *vv},
                     {vv->transpose(),
                      AffineMatrix::constant(kap * Matrix::Identity(vv->cols(), vv->cols()))}});
                prog.constraints.push_back(
                    {"GainBound(" + std::to_string(k) + "," + nm + ")", Sense::Psd,
                     std::move(gb)});
            }
        }
    }

    for (const auto& [ij, d] : del) {
        const auto& [i, j] = ij;
        const auto& vi = v[i - 1];
        const auto& vj = v[j - 1];
        auto bnd = AffineMatrix::block({
            {vi.R * mu, AffineMatrix::constant(mu * In), vi.R, d.transpose()},
            {AffineMatrix::constant(mu * In), vi.S * mu, AffineMatrix::constant(In),
             vj.S.transpose()},
            {vi.R, AffineMatrix::constant(In), vj.R, AffineMatrix::constant(In)},
            {d, vj.S, AffineMatrix::constant(In), vj.S}});
        prog.constraints.push_back({tag("Boundary", i, j), Sense::Psd, std::move(bnd)});
    }

    if (tvar) prog.constraints.push_back({"TPos", Sense::Psd, *tvar});
    return prog;
}

Matrix evaluateConstraint(const LmiProgram& program, const std::string& id,
                          const Eigen::VectorXd& x) {
    return program.find(id).matrix.eval(x);
}

std::vector<ScaleEntry> scaleReport(const LmiProgram& program) {
    std::vector<ScaleEntry> out;
    for (const auto& c : program.constraints) {
        ScaleEntry e;
        e.id = c.id;
        if (c.matrix.f0().size() > 0) e.f0_max = c.matrix.f0().cwiseAbs().maxCoeff();
        for (const auto& [k, v] : c.matrix.coeffs())
            e.coeff_max = std::max(e.coeff_max, v.cwiseAbs().maxCoeff());
        out.push_back(std::move(e));
    }
    return out;
}

std::string exportInterchange(const LmiProgram& program) {
    std::ostringstream os;
    os.precision(17);
    os << program.registry.count() << " " << program.constraints.size() << "\n";
    for (std::size_t b = 0; b < program.constraints.size(); ++b) {
        const auto& c = program.constraints[b];
        const char* sense = c.sense == Sense::StrictNeg   ? "strict_neg"
                            : c.sense == Sense::StrictPos ? "strict_pos"
                                                          : "psd";
        os << "# " << c.id << " " << sense << " " << c.matrix.rows() << "\n";
        const Matrix& f0 = c.matrix.f0();
        for (int r = 0; r < f0.rows(); ++r)
            for (int cc = r; cc < f0.cols(); ++cc)
                if (f0(r, cc) != 0.0)
                    os << b + 1 << " 0 " << r + 1 << " " << cc + 1 << " " << f0(r, cc) << "\n";
        for (const auto& [k, fk] : c.matrix.coeffs())
            for (int r = 0; r < fk.rows(); ++r)
                for (int cc = r; cc < fk.cols(); ++cc)
                    if (fk(r, cc) != 0.0)
                        os << b + 1 << " " << k + 1 << " " << r + 1 << " " << cc + 1 << " "
                           << fk(r, cc) << "\n";
    }
    return os.str();
}

}  // namespace satsw::lmi
