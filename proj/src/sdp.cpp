#include "satsw/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "satsw/errors.hpp"

namespace satsw::sdp {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

std::vector<Matrix> evalBlocks(const std::vector<SolverBlock>& blocks, const Vector& x) {
    std::vector<Matrix> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        Matrix m = b.f0;
        for (const auto& [k, fk] : b.coeffs) m += x(k) * fk;
        out.push_back(sym(m));
    }
    return out;
}

/// Largest a in [0,1] keeping M + a*dM psd, via Cholesky of M and the
/// smallest eigenvalue of L^-1 dM L^-T.
double maxStep(const std::vector<Matrix>& ms, const std::vector<Matrix>& dms) {
    double a = 1.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        Matrix m = sym(ms[i]);
        Eigen::LLT<Matrix> llt(m);
        if (llt.info() != Eigen::Success) {
            double jit = 1e-11 * std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
            llt.compute(m + jit * Matrix::Identity(m.rows(), m.cols()));
            if (llt.info() != Eigen::Success) return 0.0;
        }
        Matrix l = llt.matrixL();
        Matrix w = l.triangularView<Eigen::Lower>().solve(
            Matrix(l.triangularView<Eigen::Lower>().solve(sym(dms[i])).transpose()));
        auto [lo, hi] = linalg::symEigBounds(w);
        if (lo < 0.0) a = std::min(a, -1.0 / lo);
    }
    return a;
}

/// Eigenvalue re-check of the tightened blocks, stored under constraint ids.
std::vector<ConstraintMargin> recheckMargins(const lmi::LmiProgram& program,
                                             const std::vector<SolverBlock>& blocks,
                                             const Vector& x) {
    std::vector<ConstraintMargin> out;
    auto ms = evalBlocks(blocks, x);
    for (std::size_t i = 0; i < ms.size() && i < program.constraints.size(); ++i)
        out.push_back({program.constraints[i].id, linalg::symEigBounds(ms[i]).first});
    return out;
}

/// Margin contract: strict constraints keep at least half the eps shift,
/// psd constraints may dip to -delta (i.e. -2*delta on the tightened block).
bool marginsOk(const lmi::LmiProgram& program, const std::vector<ConstraintMargin>& margins,
               double eps, double delta) {
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const auto sense = program.constraints[i].sense;
        double floor = sense == lmi::Sense::Psd ? -2.0 * delta : -0.5 * eps;
        if (!(margins[i].lambda_min >= floor)) return false;
    }
    return true;
}

}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Feasible: return "Feasible";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

std::vector<SolverBlock> tightenedBlocks(const lmi::LmiProgram& program, double eps,
                                         double delta) {
    std::vector<SolverBlock> out;
    for (const auto& c : program.constraints) {
        SolverBlock b;
        const int d = c.matrix.rows();
        const Matrix eye = Matrix::Identity(d, d);
        if (c.sense == lmi::Sense::StrictNeg) {
            b.f0 = -c.matrix.f0() - eps * eye;
            for (const auto& [k, v] : c.matrix.coeffs()) b.coeffs.emplace(k, -v);
        } else {
            double shift = c.sense == lmi::Sense::StrictPos ? eps : delta;
            b.f0 = c.matrix.f0() - shift * eye;
            b.coeffs = c.matrix.coeffs();
        }
        out.push_back(std::move(b));
    }
    return out;
}

double minEigenvalue(const std::vector<SolverBlock>& blocks, const Vector& x) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& m : evalBlocks(blocks, x)) lo = std::min(lo, linalg::symEigBounds(m).first);
    return lo;
}

SolveOutcome minimizeLinear(const std::vector<SolverBlock>& blocks, const Vector& c,
                            const Vector& x0, const SolverOptions& opts) {
    const int m = static_cast<int>(c.size());
    const std::size_t nb = blocks.size();
    SolveOutcome out;
    out.x = x0;

    std::vector<Matrix> Z = evalBlocks(blocks, out.x);
    int ntot = 0;
    double scale = 1.0;
    for (const auto& b : blocks) {
        ntot += b.dim();
        if (b.f0.size() > 0) scale = std::max(scale, b.f0.cwiseAbs().maxCoeff());
    }
    std::vector<Matrix> X;
    for (const auto& b : blocks) X.push_back(scale * Matrix::Identity(b.dim(), b.dim()));
    const double objscale = 1.0 + c.cwiseAbs().maxCoeff();

    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it;
        std::vector<Matrix> Zi(nb);
        for (std::size_t bi = 0; bi < nb; ++bi) {
            Eigen::LLT<Matrix> llt(Z[bi]);
            if (llt.info() != Eigen::Success) {
                // Roundoff at the central-path endpoint; keep the iterate if it
                // is still (numerically) feasible.
                double lam = minEigenvalue(blocks, out.x);
                if (lam > -1e-9 * scale) {
                    out.status = SolveStatus::Feasible;
                    out.detail = "terminated at feasibility boundary";
                } else {
                    out.status = SolveStatus::NumericalFailure;
                    out.detail = "dual iterate lost definiteness";
                }
                return out;
            }
            Zi[bi] = llt.solve(Matrix::Identity(Z[bi].rows(), Z[bi].cols()));
        }
        double mu = 0.0;
        for (std::size_t bi = 0; bi < nb; ++bi) mu += dot(X[bi], Z[bi]);
        mu /= ntot;

        Vector Rp = c;
        for (std::size_t bi = 0; bi < nb; ++bi)
            for (const auto& [k, fk] : blocks[bi].coeffs) Rp(k) -= dot(fk, X[bi]);

        double pobj = 0.0;
        for (std::size_t bi = 0; bi < nb; ++bi) pobj -= dot(blocks[bi].f0, X[bi]);
        double dobj = c.dot(out.x);
        out.objective = dobj;
        double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (opts.verbose)
            std::cerr << "sdp it " << it << ": mu=" << mu << " |Rp|=" << Rp.norm()
                      << " relgap=" << relgap << " obj=" << dobj << "\n";
        if (Rp.norm() / objscale < opts.duality_gap_tol && relgap < opts.duality_gap_tol) {
            out.status = SolveStatus::Optimal;
            return out;
        }

        // Schur complement M[k][j] = sum_b tr(Zi Fk X Fj)
        Matrix M = Matrix::Zero(m, m);
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const auto& co = blocks[bi].coeffs;
            for (const auto& [k, fk] : co) {
                Matrix t = Zi[bi] * fk * X[bi];
                for (const auto& [j, fj] : co)
                    if (j >= k) M(k, j) += dot(t, fj);
            }
        }
        for (int r = 0; r < m; ++r)
            for (int cidx = 0; cidx < r; ++cidx) M(r, cidx) = M(cidx, r);
        Eigen::LDLT<Matrix> msolver(M + (1e-13 * M.trace() / m) * Matrix::Identity(m, m));

        std::vector<Matrix> dX(nb), dZ(nb);
        Vector dy(m);
        auto newton = [&](const std::vector<Matrix>& Rc) -> bool {
            Vector rhs = -Rp;
            for (std::size_t bi = 0; bi < nb; ++bi) {
                Matrix zr = Zi[bi] * Rc[bi];
                for (const auto& [k, fk] : blocks[bi].coeffs) rhs(k) += dot(fk, zr);
            }
            dy = msolver.solve(rhs);
            if (!dy.allFinite()) return false;
            for (std::size_t bi = 0; bi < nb; ++bi) {
                Matrix dz = Matrix::Zero(blocks[bi].dim(), blocks[bi].dim());
                for (const auto& [k, fk] : blocks[bi].coeffs) dz += dy(k) * fk;
                dZ[bi] = dz;
                dX[bi] = sym(Zi[bi] * (Rc[bi] - dz * X[bi]));
            }
            return true;
        };

        // predictor
        std::vector<Matrix> Rc(nb);
        for (std::size_t bi = 0; bi < nb; ++bi) Rc[bi] = -Z[bi] * X[bi];
        if (!newton(Rc)) {
            out.status = SolveStatus::NumericalFailure;
            out.detail = "singular Newton system";
            return out;
        }
        double ap = maxStep(X, dX), ad = maxStep(Z, dZ);
        if (ap == 0.0 && ad == 0.0) {
            out.status = SolveStatus::Feasible;
            out.detail = "stalled";
            return out;
        }
        double muAff = 0.0;
        double sp = std::min(1.0, 0.98 * ap), sd = std::min(1.0, 0.98 * ad);
        for (std::size_t bi = 0; bi < nb; ++bi)
            muAff += dot(X[bi] + sp * dX[bi], Z[bi] + sd * dZ[bi]);
        muAff /= ntot;
        double sigma = std::min(1.0, std::pow(std::max(muAff, 0.0) / mu, 3.0));

        // corrector
        for (std::size_t bi = 0; bi < nb; ++bi)
            Rc[bi] = sigma * mu * Matrix::Identity(blocks[bi].dim(), blocks[bi].dim()) -
                     Z[bi] * X[bi] - dZ[bi] * dX[bi];
        if (!newton(Rc)) {
            out.status = SolveStatus::NumericalFailure;
            out.detail = "singular Newton system";
            return out;
        }
        ap = std::min(1.0, 0.98 * maxStep(X, dX));
        ad = std::min(1.0, 0.98 * maxStep(Z, dZ));
        if (ap < 1e-8 && ad < 1e-8) {
            out.status = SolveStatus::Feasible;
            out.detail = "stalled";
            return out;
        }
        for (std::size_t bi = 0; bi < nb; ++bi) {
            X[bi] = sym(X[bi] + ap * dX[bi]);
            Z[bi] = sym(Z[bi] + ad * dZ[bi]);
        }
        out.x += ad * dy;
        out.objective = c.dot(out.x);
    }
    out.status = SolveStatus::Feasible;
    out.detail = "max_iterations";
    return out;
}

SolveOutcome solveFeasibilityBlocks(const std::vector<SolverBlock>& blocks, int numVars,
                                    const SolverOptions& opts) {
    std::vector<SolverBlock> aug;
    for (const auto& b : blocks) {
        SolverBlock a = b;
        Matrix eye = Matrix::Identity(b.dim(), b.dim());
        auto it = a.coeffs.find(numVars);
        if (it == a.coeffs.end())
            a.coeffs.emplace(numVars, eye);
        else
            it->second += eye;
        aug.push_back(std::move(a));
    }
    SolverBlock cap;  // tau >= -1 keeps phase 1 bounded
    cap.f0 = Matrix::Ones(1, 1);
    cap.coeffs.emplace(numVars, Matrix::Ones(1, 1));
    aug.push_back(std::move(cap));

    Vector x0 = Vector::Zero(numVars + 1);
    x0(numVars) = std::max(0.0, -minEigenvalue(blocks, Vector::Zero(numVars))) + 1.0;
    Vector c = Vector::Zero(numVars + 1);
    c(numVars) = 1.0;

    SolverOptions p1 = opts;
    p1.duality_gap_tol = opts.phase1_tol;
    SolveOutcome res = minimizeLinear(aug, c, x0, p1);
    double tau = res.x(numVars);
    res.phase1_tau = tau;
    Vector x = res.x.head(numVars);
    res.x = x;
    bool feasible = tau < 0.0 && minEigenvalue(blocks, x) > 0.0;
    if (!feasible) {
        res.status = SolveStatus::Infeasible;
        res.detail = tau < 1e-6 ? "infeasible at margin" : "infeasible";
    } else if (res.status == SolveStatus::Optimal) {
        res.status = SolveStatus::Feasible;  // feasibility answered, nothing optimized
    }
    return res;
}

SolveOutcome solveFeasibility(const lmi::LmiProgram& program, double eps, double delta,
                              const SolverOptions& opts) {
    auto blocks = tightenedBlocks(program, eps, delta);
    SolveOutcome out = solveFeasibilityBlocks(blocks, program.registry.count(), opts);
    if (out.feasible()) {
        out.margins = recheckMargins(program, blocks, out.x);
        if (!marginsOk(program, out.margins, eps, delta)) {
            out.status = SolveStatus::NumericalFailure;
            out.detail = "margin re-check failed";
        }
    }
    return out;
}

SolveOutcome minimizeGamma(const lmi::LmiProgram& program, double eps, double delta,
                           const SolverOptions& opts) {
    if (!program.t_coord) throw DomainError("minimizeGamma requires minimize mode");
    auto blocks = tightenedBlocks(program, eps, delta);
    const int m = program.registry.count();
    if (opts.gamma_cap) {
        SolverBlock cap;  // gamma_cap^2 - t >= 0
        cap.f0 = Matrix::Constant(1, 1, *opts.gamma_cap * *opts.gamma_cap);
        cap.coeffs.emplace(*program.t_coord, Matrix::Constant(1, 1, -1.0));
        blocks.push_back(std::move(cap));
    }

    SolveOutcome phase1 = solveFeasibilityBlocks(blocks, m, opts);
    if (!phase1.feasible()) return phase1;

    Vector c = Vector::Zero(m);
    c(*program.t_coord) = 1.0;
    SolveOutcome out = minimizeLinear(blocks, c, phase1.x, opts);
    out.phase1_tau = phase1.phase1_tau;
    if (!out.feasible()) return out;
    out.gamma = std::sqrt(std::max(out.x(*program.t_coord), 0.0));
    out.margins = recheckMargins(program, blocks, out.x);
    if (!marginsOk(program, out.margins, eps, delta)) {
        out.status = SolveStatus::NumericalFailure;
        out.detail = "margin re-check failed";
    }
    return out;
}

SolveOutcome bisectGamma(const std::function<lmi::LmiProgram(double)>& builder,
                         double eps, double delta, const SolverOptions& opts) {
    if (!(opts.gamma_lo < opts.gamma_hi)) throw DomainError("bisectGamma: invalid bracket");
    auto tryGamma = [&](double g) {
        return solveFeasibility(builder(g), eps, delta, opts);
    };
    SolveOutcome hi = tryGamma(opts.gamma_hi);
    if (!hi.feasible()) {
        hi.status = SolveStatus::Infeasible;
        hi.detail = "bracket upper endpoint infeasible";
        return hi;
    }
    hi.gamma = opts.gamma_hi;
    SolveOutcome lo = tryGamma(opts.gamma_lo);
    if (lo.feasible()) {
        lo.gamma = opts.gamma_lo;
        lo.bracket_not_tight = true;
        lo.detail = "bracket not tight: gamma_lo already feasible";
        return lo;
    }
    double a = opts.gamma_lo, b = opts.gamma_hi;
    SolveOutcome best = hi;
    while (b - a > opts.bisect_rel_tol * b) {
        double mid = 0.5 * (a + b);
        SolveOutcome r = tryGamma(mid);
        if (r.feasible()) {
            b = mid;
            best = r;
            best.gamma = mid;
        } else {
            a = mid;
        }
    }
    return best;
}

}  // namespace satsw::sdp
