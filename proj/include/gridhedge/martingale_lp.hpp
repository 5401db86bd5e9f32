#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridhedge/lp_core.hpp"
#include "gridhedge/marginals.hpp"
#include "gridhedge/market_model.hpp"

namespace gridhedge {

/// A (candidate) probability on the path space: one weight per path in
/// lexicographic path order.
struct PathMeasure {
    std::vector<double> weights;

    double expectation(std::span<const double> values_per_path) const;
};

enum class RowKind { Probability, Martingale, Instrument, Marginal };

/// Where each constraint row comes from, for reporting and dual extraction.
struct RowInfo {
    RowKind kind = RowKind::Probability;
    int time = -1;             ///< Martingale rows: prefix length t in 0..T-1
    std::uint64_t prefix = 0;  ///< Martingale rows: lexicographic prefix id
    int instrument = -1;       ///< Instrument rows
    int date = 0;              ///< Marginal rows
    int level = -1;            ///< Marginal rows
    bool equality = true;      ///< false only for buy-only instrument rows
    double rhs = 0.0;
};

/// The linear description of the admissible martingale measures on the grid:
///
///   probability   sum_x pi(x) = 1                                (1 row)
///   martingale    sum_{x > p} pi(x) (x_{t+1} - x_t) = 0          (one row per
///                 prefix p of each length 0..T-1)
///   instrument    E[payoff_i - price_i] <= 0 (buy-only) or = 0 (two-sided)
///   marginal      sum_{x : x_t = level} pi(x) = nu_t(level)      (optional)
///
/// Rows are stored in exactly that order. Intersected with pi >= 0 this is
/// the feasible set every solve in the engine works over.
struct ConstraintBundle {
    PathGridModel model;
    InstrumentSet instruments;
    std::vector<Marginal> marginals;

    std::uint64_t num_paths = 0;
    std::vector<RowInfo> rows;
    std::vector<lp::Triplet> entries; ///< row = index into rows, col = path id

    int num_rows() const { return static_cast<int>(rows.size()); }

    /// Assembles  min objective'pi  over the bundle with pi >= 0. Also
    /// returns, via row_of_*, the mapping back from LP constraint blocks to
    /// bundle rows (filled into eq_row_ids / ineq_row_ids).
    lp::LinearProgram to_lp(std::span<const double> objective) const;

    /// Bundle row index of each LP equality / inequality row, in LP order.
    std::vector<int> eq_row_ids() const;
    std::vector<int> ineq_row_ids() const;
};

/// Builds the constraint bundle. Marginals, when given, must carry distinct
/// dates; each contributes one equality row per level at its date.
ConstraintBundle build_constraints(const PathGridModel& model, const InstrumentSet& instruments,
                                   const std::vector<Marginal>& marginals = {},
                                   std::uint64_t max_paths = kDefaultMaxPaths);

/// Largest violation per block, recomputed by direct summation over paths
/// with fresh payoff evaluation (independent of the LP solver and of the
/// stored triplets).
struct MeasureCheckReport {
    double negativity = 0.0;
    double probability = 0.0;
    double martingale = 0.0;
    double instrument = 0.0;
    double marginal = 0.0;

    double max_violation() const;
    bool pass(double tol) const { return max_violation() <= tol; }
};

MeasureCheckReport verify_measure(const PathMeasure& pi, const ConstraintBundle& bundle);

} // namespace gridhedge
