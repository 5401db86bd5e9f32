#pragma once

#include <vector>

#include "gridhedge/martingale_lp.hpp"
#include "gridhedge/strategy.hpp"

namespace gridhedge {

/// A static position in one quoted instrument. `orientation` is -1 only for
/// two-sided instruments and means the short side of the quote; the traded
/// claim is orientation * (payoff - price) with weight >= 0.
struct StaticPosition {
    int instrument = 0;
    int orientation = +1;
    double weight = 0.0;
};

/// A certified model-independent arbitrage: a costless semi-static portfolio
///
///   f(x) = sum_n weight_n * orientation_n * (payoff_n(x) - price_n)
///        + sum_t position_t(prefix) (x_{t+1} - x_t)
///
/// with f > 0 on every grid path. min_gain is the independently recomputed
/// minimum of f.
struct ArbitrageCertificate {
    std::vector<StaticPosition> statics;
    DynamicStrategy strategy;
    double min_gain = 0.0;
};

/// Exactly one branch is meaningful, matching the grid dichotomy: either an
/// admissible martingale measure exists or an arbitrage can be written down.
struct FtapVerdict {
    bool feasible = false;
    PathMeasure measure;               ///< feasible branch
    ArbitrageCertificate certificate;  ///< arbitrage branch
    bool growth_witness_present = false;
    MeasureCheckReport measure_report; ///< recheck of the feasible branch
};

/// Decides the dichotomy for the given market. The feasible branch carries a
/// measure that passed verify_measure; the arbitrage branch carries a
/// certificate whose gain was recomputed path by path. Throws
/// NumericalFailure rather than returning an uncertified verdict.
FtapVerdict check(const PathGridModel& model, const InstrumentSet& instruments,
                  const lp::LpTolerances& tol = {},
                  std::uint64_t max_paths = kDefaultMaxPaths);

/// Minimum of the certificate's payoff over all grid paths, by direct
/// evaluation (no LP machinery).
double certify_arbitrage(const ArbitrageCertificate& cert, const PathGridModel& model,
                         const InstrumentSet& instruments,
                         std::uint64_t max_paths = kDefaultMaxPaths);

} // namespace gridhedge
