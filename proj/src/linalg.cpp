#include "satsw/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "satsw/errors.hpp"

namespace satsw::linalg {

Matrix he(const Matrix& m) {
    if (m.rows() != m.cols())
        throw NotSquare("he: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
    return m + m.transpose();
}

Vector symEigenvalues(const Matrix& m) {
    if (!m.allFinite()) throw NonFinite("symEigenvalues: non-finite entries");
    Matrix s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NonFinite("symEigenvalues: eigensolver failed");
    return es.eigenvalues();
}

std::pair<double, double> symEigBounds(const Matrix& m) {
    Vector ev = symEigenvalues(m);
    return {ev(0), ev(ev.size() - 1)};
}

bool isDefinite(const Matrix& m, Sense sense, double tol) {
    auto [lo, hi] = symEigBounds(m);
    switch (sense) {
        case Sense::Pos: return lo > tol;
        case Sense::Psd: return lo >= -tol;
        case Sense::Neg: return hi < -tol;
        case Sense::Nsd: return hi <= tol;
    }
    return false;
}

Factorization balancedFactorize(const Matrix& x, double sigmaTol) {
    if (x.rows() != x.cols()) throw NotSquare("balancedFactorize: not square");
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double sigmaMin = sv(sv.size() - 1);
    if (!(sigmaMin > sigmaTol))
        throw NearSingular("balancedFactorize: sigma_min " + std::to_string(sigmaMin) +
                               " below tolerance " + std::to_string(sigmaTol),
                           sigmaMin);
    Vector root = sv.cwiseSqrt();
    Factorization f;
    f.m = svd.matrixU() * root.asDiagonal();
    f.n = svd.matrixV() * root.asDiagonal();
    return f;
}

double cond(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    double lo = sv(sv.size() - 1);
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / lo;
}

Matrix guardedInverse(const Matrix& m, double condMax) {
    if (m.rows() != m.cols()) throw NotSquare("guardedInverse: not square");
    double c = cond(m);
    if (!(c < condMax))
        throw IllConditioned("guardedInverse: condition number " + std::to_string(c));
    return m.inverse();
}

Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) throw NotSquare("expm: not square");
    return a.exp();
}

}  // namespace satsw::linalg
