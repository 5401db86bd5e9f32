#include "gridhedge/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gridhedge {

namespace {

int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Distribution over level indices with mean exactly `value`: a mixture of
/// two-point laws bracketing the value (Dirac when the value is on-grid and
/// the coin says stay).
void exact_mean_transition(Rng& rng, const PathGridModel& model, double value,
                           std::vector<std::pair<int, double>>& out) {
    out.clear();
    const auto& lv = model.levels();
    const int G = model.grid_size();
    const int on_grid = model.level_index(value);

    const int components = uniform_int(rng, 1, 2);
    std::vector<double> mix(static_cast<std::size_t>(components));
    double mix_total = 0.0;
    for (auto& m : mix) {
        m = uniform_real(rng, 0.05, 1.0);
        mix_total += m;
    }
    for (auto& m : mix) m /= mix_total;

    for (int c = 0; c < components; ++c) {
        const double w = mix[static_cast<std::size_t>(c)];
        if (on_grid >= 0 && uniform_int(rng, 0, 2) == 0) {
            out.emplace_back(on_grid, w);
            continue;
        }
        // levels bracketing the value; the grid invariant guarantees both exist
        int below = 0, above = G - 1;
        for (int i = 0; i < G; ++i) {
            if (lv[static_cast<std::size_t>(i)] <= value) below = i;
        }
        for (int i = G - 1; i >= 0; --i) {
            if (lv[static_cast<std::size_t>(i)] >= value) above = i;
        }
        if (below == above) {
            out.emplace_back(below, w);
            continue;
        }
        const int a = uniform_int(rng, 0, below);
        const int b = uniform_int(rng, above, G - 1);
        const double la = lv[static_cast<std::size_t>(a)];
        const double lb = lv[static_cast<std::size_t>(b)];
        const double lam = (lb - value) / (lb - la);
        out.emplace_back(a, w * lam);
        out.emplace_back(b, w * (1.0 - lam));
    }
}

} // namespace

PathGridModel random_model(Rng& rng, const GenOptions& opts) {
    const int G = uniform_int(rng, opts.min_grid, opts.max_grid);
    const int T = uniform_int(rng, opts.min_horizon, opts.max_horizon);
    std::set<double> levels;
    while (static_cast<int>(levels.size()) < G) {
        double v = uniform_real(rng, 0.0, opts.max_level);
        // snap to a coarse lattice so nearby levels stay separated
        v = std::round(v * 16.0) / 16.0;
        levels.insert(v);
    }
    std::vector<double> lv(levels.begin(), levels.end());
    double s0;
    if (uniform_int(rng, 0, 1) == 0) {
        s0 = lv[static_cast<std::size_t>(uniform_int(rng, 0, G - 1))];
    } else {
        const double u = uniform_real(rng, 0.0, 1.0);
        s0 = lv.front() + u * (lv.back() - lv.front());
    }
    return PathGridModel(T, std::move(lv), s0);
}

PathMeasure random_martingale_measure(Rng& rng, const PathGridModel& model) {
    const int T = model.horizon();
    const int G = model.grid_size();
    PathIndexer ix(G, T);
    PathMeasure pi;
    pi.weights.assign(ix.path_count(), 0.0);

    // forward construction over prefixes: (prefix id, current value, mass)
    std::vector<std::pair<std::uint64_t, double>> frontier{{0, 1.0}};
    std::vector<double> values{model.s0()};
    std::vector<std::pair<int, double>> transition;
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<std::uint64_t, double>> next;
        std::vector<double> next_values;
        for (std::size_t k = 0; k < frontier.size(); ++k) {
            const auto [prefix, mass] = frontier[k];
            exact_mean_transition(rng, model, values[k], transition);
            for (const auto& [level, prob] : transition) {
                if (prob <= 0.0) continue;
                const std::uint64_t child =
                    prefix * static_cast<std::uint64_t>(G) + static_cast<std::uint64_t>(level);
                next.emplace_back(child, mass * prob);
                next_values.push_back(model.levels()[static_cast<std::size_t>(level)]);
            }
        }
        frontier = std::move(next);
        values = std::move(next_values);
    }
    for (const auto& [path, mass] : frontier) pi.weights[path] += mass;
    return pi;
}

Payoff random_payoff(Rng& rng, const PathGridModel& model) {
    const int T = model.horizon();
    const double lo = model.levels().front();
    const double hi = model.levels().back();
    const int date = uniform_int(rng, 1, T);
    switch (uniform_int(rng, 0, 6)) {
        case 0:
            return Payoff::european_call(uniform_real(rng, lo, hi), date);
        case 1:
            return Payoff::european_put(uniform_real(rng, lo, hi), date);
        case 2:
            return Payoff::power_option(uniform_real(rng, 1.1, 3.0), date);
        case 3:
            return Payoff::entropy_option(date);
        case 4:
            return Payoff::running_max();
        case 5:
            return Payoff::spread(date, uniform_int(rng, 1, T));
        default: {
            const std::uint64_t n = model.path_count_checked();
            std::vector<double> table(n);
            for (auto& v : table) v = uniform_real(rng, -hi, hi);
            return Payoff::custom(std::move(table));
        }
    }
}

InstrumentSet random_instruments(Rng& rng, const PathGridModel& model,
                                 const PathMeasure& reference, int count, bool calibrated) {
    InstrumentSet set;
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    for (int i = 0; i < count; ++i) {
        Instrument inst;
        inst.payoff = random_payoff(rng, model);
        inst.side = uniform_int(rng, 0, 1) == 0 ? Side::BuyOnly : Side::TwoSided;

        double fair = 0.0, lo = 0.0, hi = 0.0;
        bool first = true;
        for (std::uint64_t p = 0; p < reference.weights.size(); ++p) {
            ix.decode(p, idx);
            const double v = evaluate_on_indices(inst.payoff, model, idx, p);
            fair += reference.weights[p] * v;
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
        if (calibrated) {
            const double markup = inst.side == Side::BuyOnly
                                      ? uniform_real(rng, 0.0, 0.25 * (1.0 + hi - lo))
                                      : 0.0;
            inst.price = fair + markup;
        } else {
            const double pad = 0.1 * (1.0 + hi - lo);
            inst.price = uniform_real(rng, lo - pad, hi + pad);
        }
        set.instruments.push_back(std::move(inst));
    }
    // occasionally mark a super-linear quote as the designated growth witness
    for (int i = 0; i < set.size(); ++i) {
        const auto& p = set.instruments[static_cast<std::size_t>(i)].payoff;
        if ((p.kind == PayoffKind::Power || p.kind == PayoffKind::Entropy) &&
            p.date == model.horizon()) {
            set.growth_witness = i;
            break;
        }
    }
    return set;
}

Marginal random_marginal(Rng& rng, const PathGridModel& model, int date) {
    const int G = model.grid_size();
    Marginal nu;
    nu.date = date;
    nu.masses.assign(static_cast<std::size_t>(G), 0.0);
    const int components = uniform_int(rng, 1, 4);
    std::vector<std::pair<int, double>> transition;
    double total = 0.0;
    std::vector<double> mix(static_cast<std::size_t>(components));
    for (auto& m : mix) {
        m = uniform_real(rng, 0.05, 1.0);
        total += m;
    }
    for (int c = 0; c < components; ++c) {
        exact_mean_transition(rng, model, model.s0(), transition);
        for (const auto& [level, prob] : transition) {
            nu.masses[static_cast<std::size_t>(level)] += mix[static_cast<std::size_t>(c)] / total * prob;
        }
    }
    return nu;
}

RandomInstance random_instance(Rng& rng, const GenOptions& opts) {
    PathGridModel model = random_model(rng, opts);
    const PathMeasure reference = random_martingale_measure(rng, model);
    const bool calibrated =
        uniform_real(rng, 0.0, 1.0) < opts.calibrated_fraction;
    const int count = uniform_int(rng, 0, opts.max_instruments);
    InstrumentSet instruments =
        random_instruments(rng, model, reference, count, calibrated);
    return RandomInstance{std::move(model), std::move(instruments), calibrated};
}

} // namespace gridhedge
