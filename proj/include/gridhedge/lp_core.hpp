#pragma once

#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

namespace gridhedge::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// min c'y  s.t.  A_eq y = b_eq,  A_ineq y <= b_ineq,  lower <= y <= upper.
///
/// Constraint blocks are given in sparse triplet form; duplicate triplets are
/// summed when the problem is standardized. Bounds may be +-inf. Empty bound
/// vectors default to [0, +inf) for every variable.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<Triplet> eq;
    std::vector<double> eq_rhs;
    std::vector<Triplet> ineq;
    std::vector<double> ineq_rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    int num_eq() const { return static_cast<int>(eq_rhs.size()); }
    int num_ineq() const { return static_cast<int>(ineq_rhs.size()); }

    /// Throws InvalidInstance on out-of-range indices or non-finite data.
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpTolerances {
    double feas = 1e-9; ///< feasibility (primal and dual residuals)
    double gap = 1e-7;  ///< |primal objective - dual objective|
    double comp = 1e-7; ///< complementary slackness
    double pivot = 1e-10;
    int max_iterations = 0; ///< 0 means an automatic cap from problem size
};

/// Solver output. Exactly one certificate is populated, matching `status`:
///
///   Optimal    primal/dual vectors with objective agreement,
///   Infeasible a Farkas ray (farkas_eq, farkas_ineq) with farkas_ineq >= 0
///              such that g := A_eq' f_eq + A_ineq' f_ineq prices every
///              bounded feasible point above b'f:
///              sum_j min(g_j l_j, g_j u_j) - b'f > 0,
///   Unbounded  a primal ray with A_eq r = 0, A_ineq r <= 0, c'r < 0.
///
/// Dual sign convention for the min form: dual_ineq <= 0, reduced costs
/// z = c - A_eq' dual_eq - A_ineq' dual_ineq satisfy z_j >= 0 when y_j sits
/// at its lower bound and z_j <= 0 at its upper bound.
struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double objective_value = 0.0;
    double dual_objective = 0.0;
    std::vector<double> primal;
    std::vector<double> dual_eq;
    std::vector<double> dual_ineq;
    std::vector<double> reduced_costs;
    std::vector<double> farkas_eq;
    std::vector<double> farkas_ineq;
    std::vector<double> ray;
    int iterations = 0;
};

/// Revised simplex with Bland's anti-cycling rule (deterministic pivoting).
/// Certifies its own answer before returning and throws NumericalFailure
/// instead of returning an unverified result.
LpSolution solve(const LinearProgram& lp, const LpTolerances& tol = {});

/// Residuals of an Optimal solution, each computed by direct summation,
/// independent of the solver's internal state.
struct LpCheck {
    double primal_residual = 0.0;    ///< max constraint/bound violation
    double dual_residual = 0.0;      ///< max dual-feasibility violation
    double duality_gap = 0.0;        ///< |c'y - dual objective|
    double complementarity = 0.0;    ///< max slack * multiplier mismatch

    bool certified(const LpTolerances& tol) const {
        return primal_residual <= tol.feas && dual_residual <= tol.feas &&
               duality_gap <= tol.gap && complementarity <= tol.comp;
    }
};

LpCheck check_optimal(const LinearProgram& lp, const LpSolution& sol);

/// Validity margin of a Farkas ray: positive means the ray proves
/// infeasibility by that amount. -inf when a sign condition is broken
/// against an infinite bound.
double farkas_margin(const LinearProgram& lp, const LpSolution& sol);

/// Validity margin of an unboundedness ray: min over the required
/// inequalities (A_eq r = 0 within tol, A_ineq r <= 0, -c'r > 0, bound
/// directions respected). Positive-ish means valid.
double ray_residual(const LinearProgram& lp, const LpSolution& sol);

/// Writes the program in fixed-format MPS for cross-checks with external
/// solvers. Row names R1.., column names X1.., objective row COST.
void write_mps(const LinearProgram& lp, std::ostream& os, std::string_view name = "GRIDLP");

} // namespace gridhedge::lp
