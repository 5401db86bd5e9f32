#include "gridhedge/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gridhedge {

double Marginal::barycenter(const PathGridModel& model) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        acc += masses[i] * model.levels()[i];
    }
    return acc;
}

void Marginal::validate(const PathGridModel& model, double tol) const {
    if (date < 1 || date > model.horizon()) {
        throw InvalidInstance("marginal date out of range");
    }
    if (masses.size() != model.levels().size()) {
        throw InvalidInstance("marginal must have one mass per level");
    }
    double sum = 0.0;
    for (double m : masses) {
        if (!std::isfinite(m) || m < -tol) {
            throw InvalidInstance("marginal masses must be nonnegative");
        }
        sum += m;
    }
    if (std::abs(sum - 1.0) > tol) {
        std::ostringstream os;
        os << "marginal masses sum to " << sum << ", expected 1";
        throw InvalidInstance(os.str());
    }
}

CallStrip marginal_to_calls(const Marginal& nu, const PathGridModel& model,
                            std::span<const double> strikes) {
    nu.validate(model);
    CallStrip strip;
    strip.date = nu.date;
    strip.strikes.assign(strikes.begin(), strikes.end());
    strip.prices.resize(strikes.size(), 0.0);
    for (std::size_t j = 0; j < strikes.size(); ++j) {
        double p = 0.0;
        for (std::size_t i = 0; i < nu.masses.size(); ++i) {
            p += nu.masses[i] * std::max(model.levels()[i] - strikes[j], 0.0);
        }
        strip.prices[j] = p;
    }
    return strip;
}

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw StaticArbitrage("call strip rejected: " + what);
}

} // namespace

Marginal calls_to_marginal(const CallStrip& strip, const PathGridModel& model, double tol) {
    const auto& lv = model.levels();
    const std::size_t G = lv.size();
    if (strip.strikes.size() != G || strip.prices.size() != G) {
        throw InvalidInstance("call strip must quote exactly the grid levels");
    }
    for (std::size_t j = 0; j < G; ++j) {
        if (strip.strikes[j] != lv[j]) {
            throw InvalidInstance("call strip strikes must coincide with the grid levels");
        }
    }
    for (double p : strip.prices) {
        if (!std::isfinite(p)) throw InvalidInstance("call strip prices must be finite");
        if (p < -tol) reject("negative call price");
    }
    if (G == 1) {
        if (std::abs(strip.prices[0]) > tol) reject("single-level strip must price at 0");
        Marginal nu;
        nu.date = strip.date;
        nu.masses = {1.0};
        return nu;
    }

    // slopes of the piecewise-linear price curve between adjacent strikes
    std::vector<double> slope(G - 1);
    for (std::size_t j = 0; j + 1 < G; ++j) {
        slope[j] = (strip.prices[j + 1] - strip.prices[j]) / (lv[j + 1] - lv[j]);
        if (slope[j] > tol) reject("prices increase in strike");
        if (slope[j] < -1.0 - tol) reject("call spread steeper than -1");
    }
    for (std::size_t j = 0; j + 2 < G; ++j) {
        if (slope[j + 1] - slope[j] < -tol) reject("negative butterfly");
    }

    Marginal nu;
    nu.date = strip.date;
    nu.masses.assign(G, 0.0);
    // interior masses are slope increases (second divided differences)
    for (std::size_t j = 1; j + 1 < G; ++j) {
        nu.masses[j] = std::max(slope[j] - slope[j - 1], 0.0);
    }
    // boundary masses from total probability and the barycenter identity
    // E[X] = p_1 + K_1 (all mass sits at or above the lowest level)
    double interior_sum = 0.0;
    double interior_mean = 0.0;
    for (std::size_t j = 1; j + 1 < G; ++j) {
        interior_sum += nu.masses[j];
        interior_mean += nu.masses[j] * lv[j];
    }
    const double mean = strip.prices[0] + lv[0];
    const double a = lv[0];
    const double b = lv[G - 1];
    // solve m_a + m_b = 1 - interior_sum, a m_a + b m_b = mean - interior_mean
    const double mass_rest = 1.0 - interior_sum;
    const double mean_rest = mean - interior_mean;
    const double m_b = (mean_rest - a * mass_rest) / (b - a);
    const double m_a = mass_rest - m_b;
    if (m_a < -tol || m_b < -tol || mass_rest < -tol) {
        reject("prices admit no probability law on the levels");
    }
    nu.masses[0] = std::max(m_a, 0.0);
    nu.masses[G - 1] = std::max(m_b, 0.0);

    // forward re-verification: the recovered law must reproduce the quotes
    const CallStrip back = marginal_to_calls(nu, model, strip.strikes);
    for (std::size_t j = 0; j < G; ++j) {
        const double scale = 1.0 + std::abs(strip.prices[j]);
        if (std::abs(back.prices[j] - strip.prices[j]) > tol * scale) {
            reject("prices are inconsistent with every law on the grid levels");
        }
    }
    return nu;
}

double CallStripDecomposition::reconstruct(double y) const {
    double acc = constant + slope * y;
    for (std::size_t n = 0; n < strikes.size(); ++n) {
        acc += weights[n] * std::max(y - strikes[n], 0.0);
    }
    return acc;
}

CallStripDecomposition call_strip_decompose(std::span<const double> g_on_levels,
                                            const PathGridModel& model) {
    const auto& lv = model.levels();
    const std::size_t G = lv.size();
    if (g_on_levels.size() != G) {
        throw InvalidInstance("payoff must be sampled at every grid level");
    }
    CallStripDecomposition out;
    if (G == 1) {
        out.constant = g_on_levels[0];
        return out;
    }
    std::vector<double> slope(G - 1);
    for (std::size_t j = 0; j + 1 < G; ++j) {
        slope[j] = (g_on_levels[j + 1] - g_on_levels[j]) / (lv[j + 1] - lv[j]);
    }
    for (std::size_t j = 0; j + 2 < G; ++j) {
        if (slope[j + 1] < slope[j]) {
            std::ostringstream os;
            os << "payoff is not convex along the levels: slope drops from " << slope[j] << " to "
               << slope[j + 1] << " at level " << lv[j + 1];
            throw NotConvex(os.str());
        }
    }
    out.slope = slope[0];
    out.constant = g_on_levels[0] - out.slope * lv[0];
    for (std::size_t j = 1; j + 1 < G; ++j) {
        const double alpha = slope[j] - slope[j - 1];
        if (alpha > 0.0) {
            out.strikes.push_back(lv[j]);
            out.weights.push_back(alpha);
        }
    }
    return out;
}

InstrumentSet marginal_instruments(const Marginal& nu, const PathGridModel& model) {
    nu.validate(model);
    const CallStrip strip = marginal_to_calls(
        nu, model, std::span<const double>(model.levels().data(), model.levels().size()));
    InstrumentSet set;
    set.instruments.reserve(model.levels().size());
    for (std::size_t j = 0; j < model.levels().size(); ++j) {
        Instrument inst;
        inst.payoff = Payoff::european_call(model.levels()[j], nu.date);
        inst.price = strip.prices[j];
        inst.side = Side::TwoSided;
        set.instruments.push_back(std::move(inst));
    }
    return set;
}

} // namespace gridhedge
