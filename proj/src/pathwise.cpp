#include "gridhedge/pathwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridhedge {

double doob_constant() {
    static const double value = std::exp(1.0) / (std::exp(1.0) - 1.0);
    return value;
}

DoobInstance::DoobInstance(PathGridModel m, double price)
    : model(std::move(m)), entropy_price(price) {
    weight = doob_constant();
    cash_constant = doob_constant();
    validate();
}

void DoobInstance::validate() const {
    if (entropy_price < 0.0 || !std::isfinite(entropy_price)) {
        throw InvalidInstance("entropy quote must be a finite value >= 0");
    }
    if (model.s0() != 1.0) {
        throw InvalidInstance("the Doob check is normalized to s0 = 1");
    }
}

InstrumentSet doob_instruments(const PathGridModel& model, double entropy_price) {
    InstrumentSet set;
    Instrument inst;
    inst.payoff = Payoff::entropy_option(model.horizon());
    inst.price = entropy_price;
    inst.side = Side::BuyOnly;
    set.instruments.push_back(std::move(inst));
    set.growth_witness = 0;
    return set;
}

SemiStaticHedge doob_hedge(const PathGridModel& model, double entropy_price) {
    DoobInstance instance(model, entropy_price); // validates s0 = 1, price >= 0
    const double a = doob_constant();

    SemiStaticHedge hedge;
    hedge.cash = a * (entropy_price + 1.0);
    hedge.statics.push_back({0, +1, a});
    hedge.dynamic = DynamicStrategy(model.grid_size(), model.horizon());

    // position per prefix: -a log of the running maximum including x_0 = 1.
    // The same weight must sit on the dynamic leg; with a bare -log(max) the
    // domination fails on climb-then-drop paths such as (1.5, 2, 0.5).
    PathIndexer ix(model.grid_size(), model.horizon());
    const auto g = static_cast<std::uint64_t>(model.grid_size());
    for (int t = 0; t < model.horizon(); ++t) {
        for (std::uint64_t prefix = 0; prefix < ix.prefix_count(t); ++prefix) {
            double running = model.s0();
            std::uint64_t q = prefix;
            for (int s = 0; s < t; ++s) { // digits in any order: only the max matters
                running = std::max(running, model.levels()[static_cast<std::size_t>(q % g)]);
                q /= g;
            }
            if (running <= 0.0) {
                throw std::domain_error("running maximum hit 0; cannot take its log");
            }
            hedge.dynamic.set_position(t, prefix, -a * std::log(running));
        }
    }
    return hedge;
}

DoobReport doob_verify_all(const DoobInstance& instance, double tol_rel,
                           std::uint64_t max_paths) {
    instance.validate();
    const auto& model = instance.model;
    const double a = instance.weight;
    const double cash = instance.cash_constant;
    const double C = instance.entropy_price;

    const std::uint64_t n = model.path_count_checked(max_paths);
    PathIndexer ix(model.grid_size(), model.horizon());
    const int T = model.horizon();
    const auto& lv = model.levels();

    DoobReport report;
    report.paths_checked = n;
    report.min_slack = std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0;

    std::vector<int> idx(static_cast<std::size_t>(T));
    double scale = 1.0;
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        double running = model.s0();
        double prev = model.s0();
        double gains = 0.0;
        for (int t = 0; t < T; ++t) {
            const double next = lv[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
            gains += -a * std::log(running) * (next - prev);
            running = std::max(running, next);
            prev = next;
        }
        const double terminal = prev;
        const double rhs = a * (xlogx(terminal) - C) + cash * (C + 1.0) + instance.eps + gains;
        const double slack = rhs - running;
        scale = std::max({scale, std::abs(rhs), running});
        if (slack < report.min_slack) {
            report.min_slack = slack;
            argmin = p;
        }
    }
    report.tolerance = tol_rel * scale;
    report.pass = report.min_slack >= -report.tolerance;
    ix.decode(argmin, idx);
    report.argmin_path.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        report.argmin_path[static_cast<std::size_t>(t)] =
            lv[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
    }
    return report;
}

double doob_lp_bound(const PathGridModel& model, double entropy_price,
                     const lp::LpTolerances& tol, std::uint64_t max_paths) {
    DoobInstance instance(model, entropy_price); // validates the preconditions
    const InstrumentSet instruments = doob_instruments(model, entropy_price);
    const PriceBounds bounds =
        price_bounds(model, instruments, Payoff::running_max(), tol, max_paths);
    const double analytic = doob_constant() * (entropy_price + 1.0);
    if (bounds.upper.value > analytic + tol.gap) {
        std::ostringstream os;
        os << "doob bound " << bounds.upper.value << " exceeds the analytic cap " << analytic;
        throw NumericalFailure(os.str());
    }
    return bounds.upper.value;
}

InducedInequalityReport induced_martingale_inequality(const PathGridModel& model,
                                                      const PathMeasure& pi, double tol,
                                                      std::uint64_t max_paths) {
    const ConstraintBundle bundle = build_constraints(model, InstrumentSet{}, {}, max_paths);
    const MeasureCheckReport check = verify_measure(pi, bundle);
    if (!check.pass(tol)) {
        std::ostringstream os;
        os << "measure is not a martingale measure (max violation " << check.max_violation()
           << ")";
        throw NotAMartingale(os.str());
    }

    PathIndexer ix(model.grid_size(), model.horizon());
    const int T = model.horizon();
    const auto& lv = model.levels();
    const double a = doob_constant();
    std::vector<int> idx(static_cast<std::size_t>(T));
    InducedInequalityReport report;
    double entropy_mean = 0.0;
    for (std::uint64_t p = 0; p < bundle.num_paths; ++p) {
        const double w = pi.weights[p];
        if (w == 0.0) continue;
        ix.decode(p, idx);
        double running = model.s0();
        double prev = model.s0();
        double gains = 0.0;
        for (int t = 0; t < T; ++t) {
            const double next = lv[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
            gains += -a * std::log(running) * (next - prev);
            running = std::max(running, next);
            prev = next;
        }
        report.lhs += w * running;
        report.gains_expectation += w * gains;
        entropy_mean += w * xlogx(prev);
    }
    report.rhs = doob_constant() * (entropy_mean + 1.0);
    report.holds = report.lhs <= report.rhs + tol;
    return report;
}

} // namespace gridhedge
