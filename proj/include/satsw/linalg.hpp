#pragma once

#include <Eigen/Dense>
#include <utility>

namespace satsw::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// He{M} = M + M^T.
Matrix he(const Matrix& m);

/// Extreme eigenvalues (lambda_min, lambda_max) of a symmetric matrix.
/// The input is symmetrized before decomposition; entries must be finite.
std::pair<double, double> symEigBounds(const Matrix& m);

/// Full eigenvalue spectrum of a symmetric matrix, ascending.
Vector symEigenvalues(const Matrix& m);

enum class Sense { Pos, Neg, Psd, Nsd };

bool isDefinite(const Matrix& m, Sense sense, double tol);

struct Factorization {
    Matrix m;  // M = U Sigma^{1/2}
    Matrix n;  // N = V Sigma^{1/2}, so M N^T = X
};

/// Balanced SVD factorization X = M N^T with cond(M) = cond(N) = sqrt(cond(X)).
/// Throws NearSingular when sigma_min(X) <= sigmaTol.
Factorization balancedFactorize(const Matrix& x, double sigmaTol);

/// Default singular-value cutoff for balancedFactorize.
inline double defaultSigmaTol(const Matrix& x) { return 1e-8 * (1.0 + x.norm()); }

/// Condition number from singular values.
double cond(const Matrix& m);

/// Inverse with a condition-number guard (throws IllConditioned above condMax).
Matrix guardedInverse(const Matrix& m, double condMax = 1e12);

/// Matrix exponential by scaling-and-squaring with a Pade approximant.
/// Used as the exact-flow oracle for LTI segments.
Matrix expm(const Matrix& a);

}  // namespace satsw::linalg
