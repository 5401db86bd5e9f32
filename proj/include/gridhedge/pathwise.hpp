#pragma once

#include <vector>

#include "gridhedge/superrep.hpp"

namespace gridhedge {

/// e/(e-1) = 1.5819767068693265..., the sharp constant of the Doob L1
/// inequality for nonnegative martingales started at 1.
double doob_constant();

/// One configuration of the pathwise Doob check
///
///   max(x_0..x_T) <= weight * (x_T log x_T - entropy_price)
///                  + cash_constant * (entropy_price + 1) + eps
///                  + sum_t position_t (x_{t+1} - x_t),
///
/// with the explicit dynamic positions position_t =
/// -weight * log(max(x_0..x_t)) and x_0 = s0 = 1. With the defaults
/// (weight = cash_constant = e/(e-1), eps = 0) the inequality holds for all
/// nonnegative reals and is tight at paths falling to 1/e; lowering
/// cash_constant to 1 breaks it, which the negative-control test exploits.
struct DoobInstance {
    PathGridModel model;
    double entropy_price = 0.0; ///< quote of the x_T log x_T claim, >= 0
    double weight = 0.0;        ///< constructor sets e/(e-1)
    double eps = 0.0;
    double cash_constant = 0.0; ///< constructor sets e/(e-1)

    explicit DoobInstance(PathGridModel m, double entropy_price = 0.0);
    void validate() const;
};

/// The explicit semi-static super-hedge of the running maximum against a
/// single entropy instrument quoted at `entropy_price`: cash
/// e/(e-1) (entropy_price + 1), static weight e/(e-1) on the instrument,
/// dynamic position -e/(e-1) log(running max) per prefix.
SemiStaticHedge doob_hedge(const PathGridModel& model, double entropy_price = 0.0);

/// Matching single-instrument market for doob_hedge.
InstrumentSet doob_instruments(const PathGridModel& model, double entropy_price = 0.0);

struct DoobReport {
    double min_slack = 0.0;
    std::vector<double> argmin_path; ///< coordinates of a worst path
    std::uint64_t paths_checked = 0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Exhaustive pathwise check of the inequality over every grid path.
/// Passes iff min slack >= -tol_rel * scale with the default 1e-12.
DoobReport doob_verify_all(const DoobInstance& instance, double tol_rel = 1e-12,
                           std::uint64_t max_paths = kDefaultMaxPaths);

/// LP upper bound for the running maximum given the single entropy quote:
/// sup E[max] over martingale measures with E[x_T log x_T] <= C. Always at
/// most e/(e-1) (C+1) up to the duality tolerance.
double doob_lp_bound(const PathGridModel& model, double entropy_price,
                     const lp::LpTolerances& tol = {},
                     std::uint64_t max_paths = kDefaultMaxPaths);

struct InducedInequalityReport {
    double lhs = 0.0;               ///< E[max(x_0..x_T)]
    double rhs = 0.0;               ///< e/(e-1) (E[x_T log x_T] + 1)
    double gains_expectation = 0.0; ///< E[(dynamic gains)] of the Doob hedge
    bool holds = false;
};

/// Takes expectations of the pathwise inequality under a verified martingale
/// measure. Throws NotAMartingale when the measure fails the pure-martingale
/// constraints at `tol`.
InducedInequalityReport induced_martingale_inequality(const PathGridModel& model,
                                                      const PathMeasure& pi, double tol = 1e-8,
                                                      std::uint64_t max_paths = kDefaultMaxPaths);

} // namespace gridhedge
