#include "gridhedge/superrep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridhedge {

namespace {

/// Dual multipliers of  min c'pi  mapped to the hedge of the corresponding
/// maximization side. With eta := -dual, the dual constraints read, per path,
///   eta_prob + sum_t eta_mart (x_{t+1}-x_t) + sum_i eta_i phi_i(x)
///     + sum_{(t,l)} eta_{t,l} 1{x_t = l}  >=  -c(x),
/// which is pathwise domination of the payoff -c. The buy-only multipliers
/// come out >= 0, matching the long-only constraint on those quotes.
SemiStaticHedge hedge_from_duals(const ConstraintBundle& bundle,
                                 const std::vector<double>& eta_by_row) {
    const auto& model = bundle.model;
    SemiStaticHedge hedge;
    hedge.dynamic = DynamicStrategy(model.grid_size(), model.horizon());

    std::vector<EuropeanLeg> legs;
    for (const auto& nu : bundle.marginals) {
        EuropeanLeg leg;
        leg.date = nu.date;
        leg.values.assign(static_cast<std::size_t>(model.grid_size()), 0.0);
        legs.push_back(std::move(leg));
    }
    for (std::size_t r = 0; r < bundle.rows.size(); ++r) {
        const RowInfo& row = bundle.rows[r];
        double eta = eta_by_row[r];
        switch (row.kind) {
            case RowKind::Probability:
                hedge.cash = eta;
                break;
            case RowKind::Martingale:
                if (eta != 0.0) hedge.dynamic.set_position(row.time, row.prefix, eta);
                break;
            case RowKind::Instrument: {
                if (!row.equality) eta = std::max(eta, 0.0); // clamp roundoff
                if (eta == 0.0) break;
                StaticPosition pos;
                pos.instrument = row.instrument;
                pos.orientation = eta >= 0.0 ? +1 : -1;
                pos.weight = std::abs(eta);
                hedge.statics.push_back(pos);
                break;
            }
            case RowKind::Marginal: {
                for (std::size_t k = 0; k < bundle.marginals.size(); ++k) {
                    if (bundle.marginals[k].date == row.date) {
                        legs[k].values[static_cast<std::size_t>(row.level)] = eta;
                        break;
                    }
                }
                break;
            }
        }
    }
    for (auto& leg : legs) {
        const bool nonzero = std::any_of(leg.values.begin(), leg.values.end(),
                                         [](double v) { return v != 0.0; });
        if (nonzero) hedge.legs.push_back(std::move(leg));
    }
    return hedge;
}

std::vector<double> eta_by_row(const ConstraintBundle& bundle, const lp::LpSolution& sol) {
    std::vector<double> eta(bundle.rows.size(), 0.0);
    const auto eq_ids = bundle.eq_row_ids();
    const auto ineq_ids = bundle.ineq_row_ids();
    for (std::size_t i = 0; i < eq_ids.size(); ++i) {
        eta[static_cast<std::size_t>(eq_ids[i])] = -sol.dual_eq[i];
    }
    for (std::size_t i = 0; i < ineq_ids.size(); ++i) {
        eta[static_cast<std::size_t>(ineq_ids[i])] = -sol.dual_ineq[i];
    }
    return eta;
}

/// One maximization side: max phi'pi over the bundle, solved as min (-phi)'pi.
BoundSide solve_side(const ConstraintBundle& bundle, const std::vector<double>& phi_values,
                     const lp::LpTolerances& tol) {
    std::vector<double> objective(phi_values.size());
    for (std::size_t i = 0; i < phi_values.size(); ++i) objective[i] = -phi_values[i];
    const lp::LinearProgram lp = bundle.to_lp(objective);
    const lp::LpSolution sol = lp::solve(lp, tol);
    if (sol.status == lp::LpStatus::Infeasible) {
        throw NoAdmissibleMeasure(
            "no admissible martingale measure on this grid; run the arbitrage check first");
    }
    if (sol.status == lp::LpStatus::Unbounded) {
        throw NumericalFailure("pricing problem reported unbounded on a compact measure set");
    }
    BoundSide side;
    side.value = -sol.objective_value;
    side.witness.weights = sol.primal;
    side.hedge = hedge_from_duals(bundle, eta_by_row(bundle, sol));
    side.gap = std::abs(side.value - hedge_cost(side.hedge, bundle.marginals));
    return side;
}

std::vector<double> tabulate(const Payoff& phi, const PathGridModel& model,
                             std::uint64_t max_paths) {
    phi.validate(model);
    const std::uint64_t n = model.path_count_checked(max_paths);
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<double> values(n);
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        values[p] = evaluate_on_indices(phi, model, idx, p);
    }
    return values;
}

} // namespace

double hedge_cost(const SemiStaticHedge& hedge, const std::vector<Marginal>& marginals) {
    double cost = hedge.cash;
    for (const auto& leg : hedge.legs) {
        const Marginal* nu = nullptr;
        for (const auto& m : marginals) {
            if (m.date == leg.date) {
                nu = &m;
                break;
            }
        }
        if (nu == nullptr) {
            throw InvalidInstance("hedge leg has no marginal to be priced against");
        }
        for (std::size_t l = 0; l < leg.values.size(); ++l) {
            cost += leg.values[l] * nu->masses[l];
        }
    }
    return cost;
}

double verify_hedge(const SemiStaticHedge& hedge, const Payoff& phi, const PathGridModel& model,
                    const InstrumentSet& instruments, bool negate_payoff,
                    std::uint64_t max_paths) {
    phi.validate(model);
    const std::uint64_t n = model.path_count_checked(max_paths);
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    double slack_min = std::numeric_limits<double>::infinity();
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        double value = hedge.cash;
        for (const auto& pos : hedge.statics) {
            const auto& inst = instruments.instruments[static_cast<std::size_t>(pos.instrument)];
            const double quoted = evaluate_on_indices(inst.payoff, model, idx, p) - inst.price;
            value += pos.weight * pos.orientation * quoted;
        }
        for (const auto& leg : hedge.legs) {
            value += leg.values[static_cast<std::size_t>(idx[static_cast<std::size_t>(leg.date - 1)])];
        }
        if (!hedge.dynamic.empty()) value += hedge.dynamic.gain(model, idx);
        const double target = evaluate_on_indices(phi, model, idx, p);
        value -= negate_payoff ? -target : target;
        slack_min = std::min(slack_min, value);
    }
    return slack_min;
}

PriceBounds price_bounds_general(const PathGridModel& model, const InstrumentSet& instruments,
                                 const std::vector<Marginal>& marginals, const Payoff& phi,
                                 const lp::LpTolerances& tol, std::uint64_t max_paths) {
    const ConstraintBundle bundle = build_constraints(model, instruments, marginals, max_paths);
    const std::vector<double> values = tabulate(phi, model, max_paths);

    PriceBounds bounds;
    bounds.upper = solve_side(bundle, values, tol);
    std::vector<double> negated(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) negated[i] = -values[i];
    bounds.lower = solve_side(bundle, negated, tol);
    bounds.lower.value = -bounds.lower.value;

    bounds.upper.hedge.slack_min =
        verify_hedge(bounds.upper.hedge, phi, model, instruments, false, max_paths);
    bounds.lower.hedge.slack_min =
        verify_hedge(bounds.lower.hedge, phi, model, instruments, true, max_paths);
    const double worst = std::min(bounds.upper.hedge.slack_min, bounds.lower.hedge.slack_min);
    if (worst < -10.0 * tol.feas) {
        std::ostringstream os;
        os << "extracted hedge failed pathwise domination recheck (slack " << worst << ")";
        throw NumericalFailure(os.str());
    }
    return bounds;
}

PriceBounds price_bounds(const PathGridModel& model, const InstrumentSet& instruments,
                         const Payoff& phi, const lp::LpTolerances& tol,
                         std::uint64_t max_paths) {
    return price_bounds_general(model, instruments, {}, phi, tol, max_paths);
}

PriceBounds bounds_with_marginals(const PathGridModel& model,
                                  const std::vector<Marginal>& marginals, const Payoff& phi,
                                  const lp::LpTolerances& tol, std::uint64_t max_paths) {
    if (marginals.empty()) {
        throw InvalidInstance("bounds_with_marginals requires at least one marginal");
    }
    return price_bounds_general(model, InstrumentSet{}, marginals, phi, tol, max_paths);
}

} // namespace gridhedge
