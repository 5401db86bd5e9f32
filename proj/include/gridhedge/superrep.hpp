#pragma once

#include <vector>

#include "gridhedge/ftap.hpp"
#include "gridhedge/martingale_lp.hpp"
#include "gridhedge/strategy.hpp"

namespace gridhedge {

/// A European payoff vector at one date, one value per grid level. Used by
/// the marginal-pinned hedges, where the static leg is "any European claim"
/// at each pinned date rather than positions in quoted instruments.
struct EuropeanLeg {
    int date = 0;
    std::vector<double> values;
};

/// A semi-static portfolio
///
///   value(x) = cash
///            + sum_n weight_n * orientation_n * (payoff_n(x) - price_n)
///            + sum_legs leg(x_date)
///            + sum_t position_t(prefix) (x_{t+1} - x_t).
///
/// slack_min is the recomputed minimum of value(x) - target(x) over all
/// paths; >= -feas_tol certifies pathwise domination.
struct SemiStaticHedge {
    double cash = 0.0;
    std::vector<StaticPosition> statics;
    std::vector<EuropeanLeg> legs;
    DynamicStrategy dynamic;
    double slack_min = 0.0;
};

/// One side of a robust price interval: the bound, the measure attaining it,
/// the dual hedge certifying it, and the primal/dual agreement gap.
struct BoundSide {
    double value = 0.0;
    PathMeasure witness;
    SemiStaticHedge hedge;
    double gap = 0.0;
};

/// upper.hedge super-replicates the payoff from cash = upper; lower.hedge
/// super-replicates its negation from cash = -lower (the lower bound via
/// negation), so verify it with negate_payoff = true.
struct PriceBounds {
    BoundSide upper;
    BoundSide lower;
};

/// Robust price interval of `phi` over the admissible martingale measures of
/// the instrument market. Throws NoAdmissibleMeasure when the market itself
/// is infeasible (run the arbitrage check first).
PriceBounds price_bounds(const PathGridModel& model, const InstrumentSet& instruments,
                         const Payoff& phi, const lp::LpTolerances& tol = {},
                         std::uint64_t max_paths = kDefaultMaxPaths);

/// Same interval over martingale measures with the given date marginals
/// pinned (no quoted instruments). The hedges' static parts come back as
/// per-date European payoff vectors.
PriceBounds bounds_with_marginals(const PathGridModel& model,
                                  const std::vector<Marginal>& marginals, const Payoff& phi,
                                  const lp::LpTolerances& tol = {},
                                  std::uint64_t max_paths = kDefaultMaxPaths);

/// General form behind the two entry points above: instruments and marginal
/// pins may be combined.
PriceBounds price_bounds_general(const PathGridModel& model, const InstrumentSet& instruments,
                                 const std::vector<Marginal>& marginals, const Payoff& phi,
                                 const lp::LpTolerances& tol = {},
                                 std::uint64_t max_paths = kDefaultMaxPaths);

/// min over all paths of value(x) - phi(x) (or value(x) + phi(x) with
/// negate_payoff), by direct evaluation. Independent of the LP.
double verify_hedge(const SemiStaticHedge& hedge, const Payoff& phi, const PathGridModel& model,
                    const InstrumentSet& instruments, bool negate_payoff = false,
                    std::uint64_t max_paths = kDefaultMaxPaths);

/// Price of holding the hedge: cash plus the marginal-priced European legs.
/// Quoted instruments enter at their quotes, which the hedge already nets
/// out, so they contribute nothing here.
double hedge_cost(const SemiStaticHedge& hedge, const std::vector<Marginal>& marginals);

} // namespace gridhedge
