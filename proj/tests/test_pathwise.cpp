#include <doctest.h>

#include <cmath>

#include "gridhedge/instance_gen.hpp"
#include "gridhedge/pathwise.hpp"
#include "support/oracle.hpp"

using namespace gridhedge;

namespace {

/// Independent per-path slack of the hedging inequality, written out from
/// scratch: a (x_T log x_T + 1) - a sum_t log(max so far)(x_{t+1}-x_t) - max.
double slack_by_hand(const std::vector<double>& coords) {
    const double a = std::exp(1.0) / (std::exp(1.0) - 1.0);
    double running = 1.0, prev = 1.0, gains = 0.0;
    for (double next : coords) {
        gains += -a * std::log(running) * (next - prev);
        running = std::max(running, next);
        prev = next;
    }
    return a * (xlogx(prev) + 1.0) + gains - running;
}

} // namespace

TEST_SUITE("pathwise") {

TEST_CASE("hand-computed slacks on the reference paths") {
    // (1, 2, 1): rhs = a(0 + 1) + a log 2 = 2.67857, max = 2
    CHECK(slack_by_hand({1.0, 2.0, 1.0}) ==
          doctest::Approx(doob_constant() * (1.0 + std::log(2.0)) - 2.0).epsilon(1e-15));
    CHECK(slack_by_hand({1.0, 2.0, 1.0}) == doctest::Approx(0.6785194).epsilon(1e-6));

    // constant path: rhs = a, max = 1
    CHECK(slack_by_hand({1.0, 1.0, 1.0}) == doctest::Approx(doob_constant() - 1.0).epsilon(1e-15));

    // one step to 2: rhs = a(2 log 2 + 1), max = 2 (the first-step position
    // is -a log(1) = 0, so no dynamic contribution)
    CHECK(slack_by_hand({2.0}) ==
          doctest::Approx(doob_constant() * (2.0 * std::log(2.0) + 1.0) - 2.0).epsilon(1e-15));
    CHECK(slack_by_hand({2.0}) == doctest::Approx(1.7750621).epsilon(1e-6));

    // exactly tight on a one-step fall to 1/e
    CHECK(slack_by_hand({std::exp(-1.0)}) == doctest::Approx(0.0).epsilon(1e-14));

    // the climb-then-drop path that breaks an unweighted dynamic leg
    CHECK(slack_by_hand({1.5, 2.0, 0.5}) > 0.0);
}

TEST_CASE("doob_hedge dominates the running maximum") {
    const PathGridModel model(3, {0.5, 1.0, 2.0}, 1.0);
    for (double C : {0.0, 0.7}) {
        const auto hedge = doob_hedge(model, C);
        CHECK(hedge.cash == doctest::Approx(doob_constant() * (C + 1.0)).epsilon(1e-15));
        REQUIRE(hedge.statics.size() == 1);
        CHECK(hedge.statics[0].weight == doctest::Approx(doob_constant()).epsilon(1e-15));
        const double slack = verify_hedge(hedge, Payoff::running_max(), model,
                                          doob_instruments(model, C));
        CHECK(slack >= 0.0);
    }
    // the dynamic position after seeing 2 is -a log 2
    const auto hedge = doob_hedge(model, 0.0);
    CHECK(hedge.dynamic.position(1, 2) ==
          doctest::Approx(-doob_constant() * std::log(2.0)).epsilon(1e-15));
    CHECK(hedge.dynamic.position(0, 0) == 0.0); // -a log(s0) = 0
}

TEST_CASE("exhaustive verification on small grids") {
    const DoobInstance inst(PathGridModel(3, {0.5, 1.0, 2.0}, 1.0));
    const auto report = doob_verify_all(inst);
    CHECK(report.paths_checked == 27);
    CHECK(report.pass);
    CHECK(report.min_slack >= 0.0);

    // the degenerate single-level grid: slack is exactly a - 1 on the only path
    const DoobInstance single(PathGridModel(4, {1.0}, 1.0));
    const auto deg = doob_verify_all(single);
    CHECK(deg.paths_checked == 1);
    CHECK(deg.min_slack == doctest::Approx(doob_constant() - 1.0).epsilon(1e-15));
}

TEST_CASE("the hedging inequality agrees with the by-hand slack pathwise") {
    const PathGridModel model(2, {0.25, 1.0, 3.0}, 1.0);
    const DoobInstance inst(model);
    const auto report = doob_verify_all(inst);
    // argmin slack must match the independent arithmetic on that path
    CHECK(report.min_slack == doctest::Approx(slack_by_hand(report.argmin_path)).epsilon(1e-12));
}

TEST_CASE("negative control: cash constant 1 breaks on a grid with a level > e") {
    DoobInstance inst(PathGridModel(2, {0.5, 1.0, 3.0}, 1.0));
    inst.cash_constant = 1.0;
    const auto report = doob_verify_all(inst);
    CHECK_FALSE(report.pass);
    CHECK(report.min_slack < -1e-6);
}

TEST_CASE("preconditions: s0 = 1 and C >= 0") {
    CHECK_THROWS_AS(DoobInstance(PathGridModel(1, {0.5, 2.0}, 1.5)), InvalidInstance);
    CHECK_THROWS_AS(DoobInstance(PathGridModel(1, {0.5, 1.0}, 1.0), -0.25), InvalidInstance);
    CHECK_THROWS_AS(doob_lp_bound(PathGridModel(1, {0.5, 1.0, 2.0}, 0.5), 0.0),
                    InvalidInstance);
}

TEST_CASE("lp bound respects the analytic cap and the brute-force polytope") {
    // single-level grid: the only martingale is the constant one
    CHECK(doob_lp_bound(PathGridModel(3, {1.0}, 1.0), 0.0) == doctest::Approx(1.0));

    for (double C : {0.0, 1.0}) {
        const PathGridModel model(2, {0.25, 1.0, 4.0}, 1.0);
        const double bound = doob_lp_bound(model, C);
        CHECK(bound <= doob_constant() * (C + 1.0) + 1e-7);

        const auto sys = oracle::measure_system(model, doob_instruments(model, C));
        const auto range =
            oracle::objective_range(sys, oracle::payoff_table(Payoff::running_max(), model));
        REQUIRE(range.feasible);
        CHECK(bound == doctest::Approx(range.upper).epsilon(1e-9));
    }
}

TEST_CASE("lp bound is monotone in the quote and under grid refinement") {
    const PathGridModel coarse(2, {0.5, 1.0, 2.0}, 1.0);
    const PathGridModel fine(2, {0.25, 0.5, 1.0, 2.0, 4.0}, 1.0);
    double prev = 0.0;
    for (double C : {0.0, 0.5, 1.0, 2.0}) {
        const double bc = doob_lp_bound(coarse, C);
        const double bf = doob_lp_bound(fine, C);
        CHECK(bc >= prev - 1e-9);
        CHECK(bf >= bc - 1e-9); // refinement can only enlarge the measure set
        prev = bc;
    }
}

TEST_CASE("taking expectations yields the martingale inequality") {
    // Dirac at the constant path
    const PathGridModel single(2, {1.0}, 1.0);
    auto report = induced_martingale_inequality(single, PathMeasure{{1.0}});
    CHECK(report.holds);
    CHECK(report.lhs == doctest::Approx(1.0));
    CHECK(report.rhs == doctest::Approx(doob_constant()).epsilon(1e-12));

    // the forced (1/2, 1/2) law on {0, 2}
    const PathGridModel two(1, {0.0, 2.0}, 1.0);
    report = induced_martingale_inequality(two, PathMeasure{{0.5, 0.5}});
    CHECK(report.lhs == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(report.rhs ==
          doctest::Approx(doob_constant() * (0.5 * 2.0 * std::log(2.0) + 1.0)).epsilon(1e-12));
    CHECK(report.holds);
    CHECK(std::abs(report.gains_expectation) <= 1e-9);

    // non-martingale input is refused
    CHECK_THROWS_AS(induced_martingale_inequality(two, PathMeasure{{0.9, 0.1}}),
                    NotAMartingale);
}

TEST_CASE("martingale gains have zero expectation under sampled measures") {
    Rng rng(40);
    GenOptions opts;
    opts.max_grid = 4;
    opts.max_horizon = 3;
    for (int k = 0; k < 10; ++k) {
        const PathGridModel model = random_model(rng, opts);
        const PathMeasure pi = random_martingale_measure(rng, model);
        PathIndexer ix(model.grid_size(), model.horizon());
        std::vector<int> idx(static_cast<std::size_t>(model.horizon()));

        // prefix indicator strategies: one unit on a single random prefix
        for (int rep = 0; rep < 5; ++rep) {
            const int t = std::uniform_int_distribution<int>(0, model.horizon() - 1)(rng);
            const auto q = static_cast<std::uint64_t>(std::uniform_int_distribution<long long>(
                0, static_cast<long long>(ix.prefix_count(t)) - 1)(rng));
            DynamicStrategy indicator(model.grid_size(), model.horizon());
            indicator.set_position(t, q, 1.0);
            double mean = 0.0;
            for (std::uint64_t p = 0; p < pi.weights.size(); ++p) {
                if (pi.weights[p] == 0.0) continue;
                ix.decode(p, idx);
                mean += pi.weights[p] * indicator.gain(model, idx);
            }
            CHECK(std::abs(mean) <= 1e-9);
        }
    }
}

} // TEST_SUITE
