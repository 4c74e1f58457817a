#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satsw/lmi.hpp"

namespace satsw::sdp {

using linalg::Matrix;
using linalg::Vector;

/// One solver block F0 + sum_k x_k Fk >= 0 after margin tightening.
struct SolverBlock {
    Matrix f0;
    std::map<int, Matrix> coeffs;
    int dim() const { return static_cast<int>(f0.rows()); }
};

/// Shift each constraint into plain psd form:
///   strict_neg: -M - eps*I >= 0, strict_pos: M - eps*I >= 0, psd: M - delta*I >= 0.
std::vector<SolverBlock> tightenedBlocks(const lmi::LmiProgram& program, double eps,
                                         double delta);

/// Feasible: a strictly feasible margin-satisfying point that did not reach
/// the duality-gap tolerance (path stalled or iteration cap hit).
enum class SolveStatus { Optimal, Feasible, Infeasible, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolverOptions {
    int max_iterations = 200;
    double duality_gap_tol = 1e-8;
    double phase1_tol = 1e-7;
    double gamma_lo = 1e-3;          // bisection bracket
    double gamma_hi = 100.0;
    double bisect_rel_tol = 1e-4;
    std::optional<double> gamma_cap;  // adds t <= cap^2 in minimize mode
    bool verbose = false;
};

struct ConstraintMargin {
    std::string id;
    double lambda_min = 0.0;  // of the tightened block at the returned point
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::NumericalFailure;
    Vector x;                 // variable assignment (registry coordinates)
    double gamma = 0.0;       // certified level, when applicable
    double objective = 0.0;   // minimized linear functional b^T x
    int iterations = 0;
    double phase1_tau = 0.0;  // final phase-1 slack (< 0 when strictly feasible)
    std::string detail;       // stalled / max_iterations / infeasible-at-margin note
    bool bracket_not_tight = false;  // bisection clamped at gamma_lo
    std::vector<ConstraintMargin> margins;
    bool feasible() const {
        return status == SolveStatus::Optimal || status == SolveStatus::Feasible;
    }
};

/// min c^T x over the strictly feasible region of the blocks, starting from a
/// strictly feasible x0.  HKM predictor-corrector path following.
SolveOutcome minimizeLinear(const std::vector<SolverBlock>& blocks, const Vector& c,
                            const Vector& x0, const SolverOptions& opts = {});

/// Phase-1: min tau s.t. F(x) + tau*I >= 0, tau >= -1.  Feasible iff tau* < 0;
/// the returned x is a max-margin interior point of the original blocks.
SolveOutcome solveFeasibilityBlocks(const std::vector<SolverBlock>& blocks, int numVars,
                                    const SolverOptions& opts = {});

/// Smallest eigenvalue over all evaluated blocks.
double minEigenvalue(const std::vector<SolverBlock>& blocks, const Vector& x);

/// Margin-tightened strict feasibility of a full LMI program.  The outcome's
/// margins are an independent eigenvalue re-check of every constraint.
SolveOutcome solveFeasibility(const lmi::LmiProgram& program, double eps, double delta,
                              const SolverOptions& opts = {});

/// Phase-1 then direct minimization of t = gamma^2.  Program must be in
/// minimize mode; gamma = sqrt(t*) on success.
SolveOutcome minimizeGamma(const lmi::LmiProgram& program, double eps, double delta,
                           const SolverOptions& opts = {});

/// Bisection fallback over fixed-gamma programs.  The builder instantiates the
/// program at any gamma; returns the smallest feasible gamma in the bracket.
SolveOutcome bisectGamma(const std::function<lmi::LmiProgram(double)>& builder,
                         double eps, double delta, const SolverOptions& opts = {});

}  // namespace satsw::sdp
