// Acceptance suite: nine end-to-end criteria, one pass/fail line each.
// Exit code 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gridhedge/ftap.hpp"
#include "gridhedge/instance_gen.hpp"
#include "gridhedge/marginals.hpp"
#include "gridhedge/pathwise.hpp"
#include "gridhedge/superrep.hpp"
#include "support/oracle.hpp"

using namespace gridhedge;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// measures produced by criteria 1-3, re-used by criterion 9
std::vector<std::pair<PathGridModel, PathMeasure>> g_verified_measures;

Outcome criterion1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    GenOptions opts;
    opts.max_grid = 8;
    opts.max_horizon = 3;
    opts.max_instruments = 6;
    int feasible = 0, arbitrage = 0;
    double worst_violation = 0.0;
    double min_gain = 1e300;
    for (int k = 0; k < 200; ++k) {
        const RandomInstance inst = random_instance(rng, opts);
        const FtapVerdict verdict = check(inst.model, inst.instruments);
        if (verdict.feasible) {
            ++feasible;
            const auto bundle = build_constraints(inst.model, inst.instruments, {});
            const auto report = verify_measure(verdict.measure, bundle);
            worst_violation = std::max(worst_violation, report.max_violation());
            if (!(report.max_violation() <= 1e-8)) out.pass = false;
            g_verified_measures.emplace_back(inst.model, verdict.measure);
        } else {
            ++arbitrage;
            const double gain =
                certify_arbitrage(verdict.certificate, inst.model, inst.instruments);
            min_gain = std::min(min_gain, gain);
            if (!(gain > 1e-8)) out.pass = false;
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0) out.pass = false;
    out.detail << "200 instances (" << feasible << " feasible, " << arbitrage
               << " arbitrage); max measure violation " << worst_violation
               << "; min certified gain " << min_gain << "; " << elapsed << " s (< 60 s)";
    return out;
}

Outcome criterion2() {
    Outcome out;
    Rng rng(1002);
    GenOptions opts;
    opts.max_grid = 6;
    opts.max_horizon = 3;
    opts.calibrated_fraction = 1.0; // pricing needs a nonempty measure set
    double worst_gap = 0.0, worst_slack = 0.0;
    for (int k = 0; k < 100; ++k) {
        const RandomInstance inst = random_instance(rng, opts);
        const Payoff phi = random_payoff(rng, inst.model);
        const PriceBounds bounds = price_bounds(inst.model, inst.instruments, phi);
        worst_gap = std::max({worst_gap, bounds.upper.gap, bounds.lower.gap});
        worst_slack = std::min({worst_slack, bounds.upper.hedge.slack_min,
                                bounds.lower.hedge.slack_min});
        if (!(bounds.upper.gap <= 1e-7 && bounds.lower.gap <= 1e-7)) out.pass = false;
        if (!(bounds.upper.hedge.slack_min >= -1e-9 && bounds.lower.hedge.slack_min >= -1e-9)) {
            out.pass = false;
        }
        g_verified_measures.emplace_back(inst.model, bounds.upper.witness);
        g_verified_measures.emplace_back(inst.model, bounds.lower.witness);
    }
    out.detail << "100 pricing instances; worst duality gap " << worst_gap
               << " (<= 1e-7); worst hedge slack " << worst_slack << " (>= -1e-9)";
    return out;
}

Outcome criterion3() {
    Outcome out;
    Rng rng(1003);
    GenOptions opts;
    opts.max_grid = 3;
    opts.max_horizon = 2;
    opts.max_instruments = 4;
    double worst_err = 0.0;
    int feasible = 0, infeasible = 0;

    auto compare = [&](const PathGridModel& model, const InstrumentSet& instruments,
                       const std::vector<Marginal>& marginals, const Payoff& phi) {
        const auto sys = oracle::measure_system(model, instruments, marginals);
        const auto table = oracle::payoff_table(phi, model);
        const auto range = oracle::objective_range(sys, table, 1e-9);
        try {
            const PriceBounds bounds =
                price_bounds_general(model, instruments, marginals, phi);
            if (!range.feasible) {
                out.pass = false; // engine priced an empty polytope
                return;
            }
            ++feasible;
            const double err = std::max(std::abs(bounds.upper.value - range.upper),
                                        std::abs(bounds.lower.value - range.lower));
            worst_err = std::max(worst_err, err);
            if (!(err <= 1e-9)) out.pass = false;
            g_verified_measures.emplace_back(model, bounds.upper.witness);
        } catch (const NoAdmissibleMeasure&) {
            ++infeasible;
            if (range.feasible) out.pass = false; // oracle disagrees
        }
    };

    // the textbook one-step call
    compare(PathGridModel(1, {0.0, 1.0, 2.0}, 1.0), {}, {}, Payoff::european_call(1.0, 1));
    // the mispriced two-sided call: both routes must report empty
    {
        InstrumentSet bad;
        bad.instruments.push_back({Payoff::european_call(1.0, 1), 0.75, Side::TwoSided});
        compare(PathGridModel(1, {0.0, 1.0, 2.0}, 1.0), bad, {}, Payoff::running_max());
    }
    // the forced 2x2 coupling
    compare(PathGridModel(2, {0.0, 0.5, 1.5, 2.0}, 1.0), {},
            {Marginal{1, {0.0, 0.5, 0.5, 0.0}}, Marginal{2, {0.5, 0.0, 0.0, 0.5}}},
            Payoff::spread(2, 1));

    for (int k = 0; k < 40; ++k) {
        const RandomInstance inst = random_instance(rng, opts);
        const Payoff phi = random_payoff(rng, inst.model);
        if (k % 4 == 0) {
            const int date = std::uniform_int_distribution<int>(1, inst.model.horizon())(rng);
            compare(inst.model, {}, {random_marginal(rng, inst.model, date)}, phi);
        } else {
            compare(inst.model, inst.instruments, {}, phi);
        }
    }
    out.detail << feasible << " feasible + " << infeasible
               << " infeasible instances vs brute-force vertex oracle; worst bound error "
               << worst_err << " (<= 1e-9)";
    return out;
}

Outcome criterion4() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<PathGridModel> grids = {
        PathGridModel(5,
                      {0.2, 0.3, 0.36787944117144233, 0.5, 0.75, 1.0, 1.5, 2.0,
                       2.718281828459045, 4.0, 6.0, 9.0},
                      1.0),
        PathGridModel(4, {0.5, 1.0, 2.0, 4.0}, 1.0),
        PathGridModel(3, {0.25, 0.5, 1.0, 3.0}, 1.0),
    };
    double worst = 1e300;
    std::uint64_t paths = 0;
    for (const auto& model : grids) {
        const DoobInstance inst(model);
        const DoobReport report = doob_verify_all(inst);
        paths += report.paths_checked;
        worst = std::min(worst, report.min_slack);
        if (!(report.min_slack >= -1e-12)) out.pass = false;
    }
    // negative control: cash lowered to 1 on a grid holding a level > e
    DoobInstance broken(PathGridModel(3, {0.25, 0.5, 1.0, 3.0}, 1.0));
    broken.cash_constant = 1.0;
    const DoobReport control = doob_verify_all(broken);
    if (!(control.min_slack < 0.0)) out.pass = false;
    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) out.pass = false;
    out.detail << paths << " paths over 3 grids (up to G=12, T=5); min slack " << worst
               << " (>= -1e-12); negative control slack " << control.min_slack << " at path (";
    for (std::size_t i = 0; i < control.argmin_path.size(); ++i) {
        out.detail << (i ? " " : "") << control.argmin_path[i];
    }
    out.detail << "); " << elapsed << " s (< 10 s)";
    return out;
}

Outcome criterion5() {
    Outcome out;
    const std::vector<PathGridModel> grids = {
        PathGridModel(2, {0.5, 1.0, 2.0}, 1.0),
        PathGridModel(2, {0.25, 1.0, 4.0}, 1.0),
        PathGridModel(3, {0.36787944117144233, 0.5, 1.0, 2.718281828459045}, 1.0),
    };
    double worst_margin = 1e300;
    for (const auto& model : grids) {
        for (double C : {0.0, 0.5, 1.0, 2.0}) {
            const double bound = doob_lp_bound(model, C);
            const double cap = doob_constant() * (C + 1.0);
            worst_margin = std::min(worst_margin, cap - bound);
            if (!(bound <= cap + 1e-7)) out.pass = false;
            if (C == 0.0 && !(bound >= 1.0 - 1e-9)) out.pass = false;
        }
    }
    out.detail << "C in {0, 0.5, 1, 2} on 3 grids; min analytic headroom " << worst_margin
               << "; e/(e-1) = " << doob_constant();
    return out;
}

Outcome criterion6() {
    Outcome out;
    const std::vector<PathGridModel> grids = {
        PathGridModel(2, {0.5, 1.0, 2.0, 4.0}, 1.0),
        PathGridModel(3, {0.25, 0.5, 1.0, 2.0}, 1.0),
        PathGridModel(2, {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}, 1.0),
    };
    struct Claim {
        const char* name;
        std::function<Payoff(int)> payoff;
        std::function<double(double)> derivative;
    };
    const std::vector<Claim> claims = {
        {"y^2", [](int t) { return Payoff::power_option(2.0, t); },
         [](double y) { return 2.0 * y; }},
        {"(y-1)_+", [](int t) { return Payoff::european_call(1.0, t); },
         [](double y) { return y >= 1.0 ? 1.0 : 0.0; }},
        {"y log y", [](int t) { return Payoff::entropy_option(t); },
         [](double y) { return std::log(y) + 1.0; }},
    };
    double worst = 1e300;
    int checked = 0;
    for (const auto& model : grids) {
        for (const auto& claim : claims) {
            // dominate the date-d claim with the date-(d+1) claim plus the
            // derivative position traded after observing x_d
            for (int d = 1; d + 1 <= model.horizon(); ++d) {
                InstrumentSet set;
                set.instruments.push_back({claim.payoff(d + 1), 0.0, Side::BuyOnly});
                SemiStaticHedge hedge;
                hedge.statics.push_back({0, +1, 1.0});
                hedge.dynamic = DynamicStrategy(model.grid_size(), model.horizon());
                PathIndexer ix(model.grid_size(), model.horizon());
                for (std::uint64_t q = 0; q < ix.prefix_count(d); ++q) {
                    const double x_d =
                        model.levels()[static_cast<std::size_t>(ix.prefix_last(q))];
                    hedge.dynamic.set_position(d, q, -claim.derivative(x_d));
                }
                const double slack = verify_hedge(hedge, claim.payoff(d), model, set);
                worst = std::min(worst, slack);
                ++checked;
                if (!(slack >= 0.0)) out.pass = false;
            }
        }
    }
    out.detail << checked << " calendar-spread hedges over 3 grids x {y^2, (y-1)_+, y log y}; "
               << "min slack " << worst << " (>= 0 exactly)";
    return out;
}

Outcome criterion7() {
    Outcome out;
    Rng rng(1007);
    GenOptions opts;
    opts.max_grid = 8;
    opts.min_grid = 3;
    opts.max_horizon = 2;
    double worst_mass_err = 0.0;
    int rejected = 0, injected = 0;
    for (int k = 0; k < 100; ++k) {
        const PathGridModel model = random_model(rng, opts);
        const int date = std::uniform_int_distribution<int>(1, model.horizon())(rng);
        const Marginal nu = random_marginal(rng, model, date);
        const auto strip = marginal_to_calls(
            nu, model, std::span<const double>(model.levels().data(), model.levels().size()));
        const Marginal back = calls_to_marginal(strip, model);
        for (std::size_t l = 0; l < nu.masses.size(); ++l) {
            worst_mass_err = std::max(worst_mass_err, std::abs(back.masses[l] - nu.masses[l]));
        }
        if (!(worst_mass_err <= 1e-12)) out.pass = false;

        // inject a butterfly violation: push an interior quote above the
        // chord through its neighbours, then require rejection
        if (model.grid_size() >= 3) {
            ++injected;
            CallStrip bad = strip;
            const std::size_t j = 1 + (static_cast<std::size_t>(rng()) %
                                       (bad.prices.size() - 2));
            const double h1 = bad.strikes[j] - bad.strikes[j - 1];
            const double h2 = bad.strikes[j + 1] - bad.strikes[j];
            const double chord = bad.prices[j - 1] +
                                 (bad.prices[j + 1] - bad.prices[j - 1]) * h1 / (h1 + h2);
            bad.prices[j] = chord + 1e-4; // butterfly violation >= 1e-6 on these grids
            try {
                (void)calls_to_marginal(bad, model);
                out.pass = false; // must have been rejected
            } catch (const StaticArbitrage&) {
                ++rejected;
            }
        }
    }
    out.detail << "100 round trips; max mass error " << worst_mass_err << " (<= 1e-12); "
               << rejected << "/" << injected << " injected butterfly violations rejected";
    return out;
}

Outcome criterion8() {
    Outcome out;
    Rng rng(1008);
    GenOptions opts;
    opts.max_grid = 5;
    opts.max_horizon = 2;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const PathGridModel model = random_model(rng, opts);
        const int date = std::uniform_int_distribution<int>(1, model.horizon())(rng);
        const Marginal nu = random_marginal(rng, model, date);
        const Payoff phi = random_payoff(rng, model);
        const PriceBounds via_quotes = price_bounds(model, marginal_instruments(nu, model), phi);
        const PriceBounds via_block = bounds_with_marginals(model, {nu}, phi);
        const double err = std::max(std::abs(via_quotes.upper.value - via_block.upper.value),
                                    std::abs(via_quotes.lower.value - via_block.lower.value));
        worst = std::max(worst, err);
        if (!(err <= 1e-7)) out.pass = false;
    }
    out.detail << "50 (payoff, marginal) pairs; max route disagreement " << worst
               << " (<= 1e-7)";
    return out;
}

Outcome criterion9() {
    Outcome out;
    Rng rng(1009);
    double worst = 0.0;
    std::size_t strategies = 0;
    for (const auto& [model, pi] : g_verified_measures) {
        PathIndexer ix(model.grid_size(), model.horizon());
        std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
        for (int rep = 0; rep < 20; ++rep) {
            DynamicStrategy dyn(model.grid_size(), model.horizon());
            for (int t = 0; t < model.horizon(); ++t) {
                for (std::uint64_t q = 0; q < ix.prefix_count(t); ++q) {
                    dyn.set_position(t, q,
                                     std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
                }
            }
            double mean = 0.0;
            for (std::uint64_t p = 0; p < pi.weights.size(); ++p) {
                if (pi.weights[p] == 0.0) continue;
                ix.decode(p, idx);
                mean += pi.weights[p] * dyn.gain(model, idx);
            }
            ++strategies;
            worst = std::max(worst, std::abs(mean));
            if (!(std::abs(mean) <= 1e-9)) out.pass = false;
        }
    }
    out.detail << g_verified_measures.size() << " verified measures x 20 bounded strategies ("
               << strategies << " expectations); max |E[gains]| " << worst << " (<= 1e-9)";
    return out;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"ftap dichotomy with certified verdicts", criterion1},
        {"zero duality gap and dominating hedges", criterion2},
        {"brute-force vertex-oracle equivalence", criterion3},
        {"pathwise Doob certificate (exhaustive)", criterion4},
        {"Doob LP bound under e/(e-1)(C+1)", criterion5},
        {"calendar-spread hedges with exact slack", criterion6},
        {"Breeden-Litzenberger round trips and rejections", criterion7},
        {"marginal pin vs call-quote route equivalence", criterion8},
        {"martingale gains neutrality", criterion9},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        all = all && out.pass;
        std::printf("[%s] %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    out.detail.str().c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
