#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satsw/model.hpp"

namespace satsw::lmi {

/// Affine matrix expression F0 + sum_k x_k Fk with sparse coefficient list.
class AffineMatrix {
  public:
    AffineMatrix() = default;
    AffineMatrix(int rows, int cols) : f0_(Matrix::Zero(rows, cols)) {}
    static AffineMatrix constant(Matrix m);

    int rows() const { return static_cast<int>(f0_.rows()); }
    int cols() const { return static_cast<int>(f0_.cols()); }
    const Matrix& f0() const { return f0_; }
    const std::map<int, Matrix>& coeffs() const { return coeffs_; }

    void addConstant(const Matrix& m) { f0_ += m; }
    void addCoeff(int coord, const Matrix& m);

    AffineMatrix operator+(const AffineMatrix& o) const;
    AffineMatrix operator-(const AffineMatrix& o) const;
    AffineMatrix operator*(double s) const;
    AffineMatrix transpose() const;
    AffineMatrix leftMul(const Matrix& c) const;   // c * this
    AffineMatrix rightMul(const Matrix& c) const;  // this * c
    AffineMatrix he() const;                       // this + this^T

    /// Evaluate at an assignment (only coords present are read).
    Matrix eval(const Eigen::VectorXd& x) const;

    static AffineMatrix block(const std::vector<std::vector<AffineMatrix>>& grid);

  private:
    Matrix f0_;
    std::map<int, Matrix> coeffs_;
};

/// Flat scalar-coordinate registry producing structured matrix variables.
class VariableRegistry {
  public:
    AffineMatrix addSymmetric(const std::string& name, int d);
    AffineMatrix addDiagonal(const std::string& name, int d);
    AffineMatrix addFull(const std::string& name, int rows, int cols);
    AffineMatrix addScalar(const std::string& name);

    int count() const { return next_; }
    const AffineMatrix& variable(const std::string& name) const;
    bool has(const std::string& name) const { return vars_.count(name) > 0; }
    Matrix value(const std::string& name, const Eigen::VectorXd& x) const;
    std::vector<std::string> names() const;

  private:
    int next_ = 0;
    std::map<std::string, AffineMatrix> vars_;
    std::vector<std::string> order_;
};

enum class Sense { StrictNeg, StrictPos, Psd };

struct LmiConstraint {
    std::string id;       // Perf(i) | Coupling(i) | Boundary(i,j) | Inclusion(i,m) | GainBound(i,V) | TPos
    Sense sense;
    AffineMatrix matrix;  // symmetric affine block
};

struct LmiProgram {
    VariableRegistry registry;
    std::vector<LmiConstraint> constraints;
    std::optional<int> t_coord;  // gamma^2 coordinate in minimize mode
    int numModes = 0;

    const LmiConstraint& find(const std::string& id) const;
};

struct BuildOptions {
    /// Restrict Boundary constraints to the ordered pairs that actually occur
    /// in a switching signal; all pairs when empty (the default).
    std::vector<std::pair<int, int>> switching_pairs;
};

/// Assemble the synthesis program: per-mode performance, coupling and
/// inclusion constraints, per-pair boundary constraints, optional gain
/// bounds, and the gamma^2 objective variable in minimize mode.
LmiProgram buildProgram(const SwitchedPlant& plant, const SynthesisSpec& spec,
                        const BuildOptions& opts = {});

Matrix evaluateConstraint(const LmiProgram& program, const std::string& id,
                          const Eigen::VectorXd& x);

struct ScaleEntry {
    std::string id;
    double f0_max = 0.0;
    double coeff_max = 0.0;
};

std::vector<ScaleEntry> scaleReport(const LmiProgram& program);

/// Sparse block-diagonal listing: one line per nonzero
/// (constraint, variable, row, col, value); variable 0 is the constant block.
std::string exportInterchange(const LmiProgram& program);

}  // namespace satsw::lmi
