#pragma once

#include <span>
#include <vector>

#include "gridhedge/market_model.hpp"

namespace gridhedge {

/// A one-dimensional law for the price at one date, as masses per grid level.
struct Marginal {
    int date = 0;               // 1..T
    std::vector<double> masses; // one entry per level, >= 0, summing to 1

    /// sum_level masses[level] * levels[level]
    double barycenter(const PathGridModel& model) const;

    /// Throws InvalidInstance unless the masses form a probability vector on
    /// the model's levels and the date is in range.
    void validate(const PathGridModel& model, double tol = 1e-9) const;
};

/// A strip of call quotes at one date: strikes K_1 < ... < K_M with prices
/// p_1, ..., p_M. `weights` is optional bookkeeping for synthesizing
/// super-linear payoffs out of the strip; it never enters the inversion.
struct CallStrip {
    int date = 0;
    std::vector<double> strikes;
    std::vector<double> prices;
    std::vector<double> weights;
};

/// Exact call prices of a marginal: p_j = sum_level nu(level) (level - K_j)_+.
CallStrip marginal_to_calls(const Marginal& nu, const PathGridModel& model,
                            std::span<const double> strikes);

/// Inverts a call strip quoted at exactly the grid levels back to the
/// marginal law. Interior masses come from second differences of the price
/// curve; the two boundary masses are fixed by total probability one and by
/// barycenter = strike-K_1 price + K_1. The result is re-verified through
/// the forward map.
///
/// Throws StaticArbitrage when the strip violates a strike-space
/// no-arbitrage condition (negative price, increasing prices, negative
/// butterfly, call spread steeper than -1) or is inconsistent with every
/// probability law on the levels. Throws InvalidInstance when the strikes
/// are not exactly the model's levels.
Marginal calls_to_marginal(const CallStrip& strip, const PathGridModel& model,
                           double tol = 1e-9);

/// Exact decomposition of a convex piecewise-linear payoff sampled on the
/// levels: g(y) = constant + slope * y + sum_n weight_n (y - strike_n)_+ at
/// every level, with all weights >= 0 (the slope increases at interior
/// kinks). Throws NotConvex when a slope decrease is detected.
struct CallStripDecomposition {
    double constant = 0.0;
    double slope = 0.0;
    std::vector<double> strikes; // interior levels carrying weight
    std::vector<double> weights; // >= 0

    double reconstruct(double y) const;
};

CallStripDecomposition call_strip_decompose(std::span<const double> g_on_levels,
                                            const PathGridModel& model);

/// Two-sided call instruments at every grid strike at the marginal's date,
/// priced by marginal_to_calls. Feeding these to the constraint builder pins
/// the date's marginal exactly.
InstrumentSet marginal_instruments(const Marginal& nu, const PathGridModel& model);

} // namespace gridhedge
