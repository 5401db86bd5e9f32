#include <doctest.h>

#include <cmath>
#include <set>

#include "gridhedge/instance_gen.hpp"
#include "gridhedge/market_model.hpp"

using namespace gridhedge;

TEST_SUITE("market_model") {

TEST_CASE("model validation") {
    CHECK_NOTHROW(PathGridModel(1, {0.0, 1.0, 2.0}, 1.0));
    CHECK_THROWS_AS(PathGridModel(0, {1.0}, 1.0), InvalidInstance);
    CHECK_THROWS_AS(PathGridModel(1, {}, 1.0), InvalidInstance);
    CHECK_THROWS_AS(PathGridModel(1, {1.0, 1.0}, 1.0), InvalidInstance);
    CHECK_THROWS_AS(PathGridModel(1, {2.0, 1.0}, 1.5), InvalidInstance);
    CHECK_THROWS_AS(PathGridModel(1, {-1.0, 1.0}, 0.0), InvalidInstance);
    // s0 outside the level hull admits no martingale measure
    CHECK_THROWS_AS(PathGridModel(1, {1.0, 2.0}, 0.5), InvalidInstance);
    CHECK_THROWS_AS(PathGridModel(1, {1.0, 2.0}, 2.5), InvalidInstance);
}

TEST_CASE("payoff evaluation examples") {
    const PathGridModel m1(1, {0.0, 1.0, 2.0}, 1.0);
    CHECK(evaluate(Payoff::european_call(1.0, 1), Path{{2.0}}, m1) == 1.0);
    CHECK(evaluate(Payoff::european_put(1.0, 1), Path{{0.0}}, m1) == 1.0);

    const PathGridModel m3(3, {1.0, 2.0}, 1.0);
    CHECK(evaluate(Payoff::running_max(), Path{{1.0, 2.0, 1.0}}, m3) == 2.0);

    // entropy at a terminal value of 1 is 1*log 1 = 0
    CHECK(evaluate(Payoff::entropy_option(3), Path{{2.0, 2.0, 1.0}}, m3) == 0.0);
    // and the continuous extension at 0 is 0
    CHECK(evaluate(Payoff::entropy_option(1), Path{{0.0}}, m1) == 0.0);

    CHECK(evaluate(Payoff::spread(2, 1), Path{{1.0, 2.0, 1.0}}, m3) == 1.0);
    CHECK(evaluate(Payoff::power_option(2.0, 1), Path{{2.0}}, m1) == 4.0);
}

TEST_CASE("off-grid coordinates are rejected") {
    const PathGridModel m(2, {0.5, 1.0, 2.0}, 1.0);
    CHECK_THROWS_AS(evaluate(Payoff::running_max(), Path{{0.7, 1.0}}, m), InvalidPath);
    CHECK_THROWS_AS(evaluate(Payoff::running_max(), Path{{1.0}}, m), InvalidPath);
}

TEST_CASE("payoff parameter validation") {
    const PathGridModel m(2, {0.5, 1.0, 2.0}, 1.0);
    CHECK_THROWS_AS(Payoff::european_call(1.0, 3).validate(m), InvalidInstance);
    CHECK_THROWS_AS(Payoff::european_call(-1.0, 1).validate(m), InvalidInstance);
    CHECK_THROWS_AS(Payoff::power_option(1.0, 1).validate(m), InvalidInstance);
    CHECK_THROWS_AS(Payoff::custom({1.0, 2.0}).validate(m), InvalidInstance); // needs 9
    CHECK_NOTHROW(Payoff::custom(std::vector<double>(9, 0.25)).validate(m));

    InstrumentSet set;
    set.instruments.push_back({Payoff::european_call(1.0, 1), 0.0, Side::BuyOnly});
    set.growth_witness = 0; // a call is not super-linear
    CHECK_THROWS_AS(set.validate(m), InvalidInstance);
    set.instruments.push_back({Payoff::power_option(2.0, 2), 0.0, Side::BuyOnly});
    set.growth_witness = 1;
    CHECK_NOTHROW(set.validate(m));
}

TEST_CASE("path enumeration order and limits") {
    const PathGridModel m1(1, {0.0, 2.0}, 1.0);
    auto paths = enumerate_paths(m1);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].coordinates == std::vector<double>{0.0});
    CHECK(paths[1].coordinates == std::vector<double>{2.0});

    const PathGridModel m2(2, {0.0, 2.0}, 1.0);
    paths = enumerate_paths(m2);
    REQUIRE(paths.size() == 4);
    CHECK(paths[0].coordinates == std::vector<double>{0.0, 0.0});
    CHECK(paths[1].coordinates == std::vector<double>{0.0, 2.0});
    CHECK(paths[2].coordinates == std::vector<double>{2.0, 0.0});
    CHECK(paths[3].coordinates == std::vector<double>{2.0, 2.0});

    std::vector<double> many;
    for (int i = 0; i < 20; ++i) many.push_back(i);
    const PathGridModel big(6, many, 1.0); // 20^6 = 6.4e7 > default cap
    CHECK_THROWS_AS(enumerate_paths(big), SizeLimitError);
    CHECK_THROWS_AS(big.path_count_checked(), SizeLimitError);
    CHECK(big.path_count().value() == 64000000ull);
}

TEST_CASE("strike-zero call equals the terminal coordinate") {
    Rng rng(1234);
    GenOptions opts;
    opts.max_grid = 5;
    opts.max_horizon = 3;
    for (int k = 0; k < 20; ++k) {
        const PathGridModel m = random_model(rng, opts);
        const Payoff call0 = Payoff::european_call(0.0, m.horizon());
        for (const auto& path : enumerate_paths(m)) {
            CHECK(evaluate(call0, path, m) == path.coordinates.back());
        }
    }
}

TEST_CASE("power payoffs are convex along the level axis") {
    Rng rng(99);
    GenOptions opts;
    opts.max_grid = 7;
    opts.max_horizon = 1;
    for (int k = 0; k < 20; ++k) {
        const PathGridModel m = random_model(rng, opts);
        const double p = std::uniform_real_distribution<double>(1.1, 3.0)(rng);
        const Payoff pow_payoff = Payoff::power_option(p, 1);
        const auto& lv = m.levels();
        for (std::size_t i = 0; i + 2 < lv.size(); ++i) {
            const double a = lv[i], b = lv[i + 1], c = lv[i + 2];
            const double lambda = (c - b) / (c - a);
            const double va = evaluate(pow_payoff, Path{{a}}, m);
            const double vb = evaluate(pow_payoff, Path{{b}}, m);
            const double vc = evaluate(pow_payoff, Path{{c}}, m);
            CHECK(vb <= lambda * va + (1.0 - lambda) * vc + 1e-12);
        }
    }
}

TEST_CASE("enumeration yields exactly G^T distinct paths") {
    const PathGridModel m(3, {0.5, 1.0, 4.0}, 1.0);
    const auto paths = enumerate_paths(m);
    CHECK(paths.size() == 27);
    std::set<std::vector<double>> unique;
    for (const auto& p : paths) unique.insert(p.coordinates);
    CHECK(unique.size() == 27);
}

} // TEST_SUITE
