#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gridhedge/marginals.hpp"
#include "gridhedge/market_model.hpp"
#include "gridhedge/martingale_lp.hpp"

namespace gridhedge {

/// Knobs for the seeded instance generator behind `selftest` and the
/// randomized test suites.
struct GenOptions {
    int min_grid = 2;
    int max_grid = 8;
    int min_horizon = 1;
    int max_horizon = 3;
    int max_instruments = 6;
    double max_level = 10.0;
    /// probability that instrument prices are calibrated to a reference
    /// martingale measure (guaranteeing feasibility) rather than sampled
    /// blindly from the payoff range
    double calibrated_fraction = 0.5;
};

using Rng = std::mt19937_64;

PathGridModel random_model(Rng& rng, const GenOptions& opts);

/// A martingale measure built forward by exact-mean transitions; useful both
/// as a feasibility witness and to calibrate instrument prices.
PathMeasure random_martingale_measure(Rng& rng, const PathGridModel& model);

Payoff random_payoff(Rng& rng, const PathGridModel& model);

/// Instruments priced off `reference` when calibrated (feasible by
/// construction: buy-only quotes get a nonnegative markup), or priced
/// blindly inside the payoff range otherwise.
InstrumentSet random_instruments(Rng& rng, const PathGridModel& model,
                                 const PathMeasure& reference, int count, bool calibrated);

/// A marginal with barycenter exactly s0 (a mixture of two-point laws
/// centered at s0), so the martingale polytope pinned to it is nonempty.
Marginal random_marginal(Rng& rng, const PathGridModel& model, int date);

struct RandomInstance {
    PathGridModel model;
    InstrumentSet instruments;
    bool calibrated = false; ///< true implies a martingale measure exists
};

RandomInstance random_instance(Rng& rng, const GenOptions& opts);

} // namespace gridhedge
