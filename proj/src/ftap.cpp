#include "gridhedge/ftap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridhedge {

namespace {

/// Farkas multipliers of the feasibility system, keyed back to bundle rows.
/// With every pi-variable bounded below by 0, validity reads
///   sum_rows f_r * coeff_r(x) >= 0 for every path x,  f'rhs < 0,
/// which after dropping the probability row is exactly a strictly positive
/// semi-static portfolio.
ArbitrageCertificate certificate_from_farkas(const ConstraintBundle& bundle,
                                             const std::vector<double>& farkas_by_row) {
    const auto& model = bundle.model;
    ArbitrageCertificate cert;
    cert.strategy = DynamicStrategy(model.grid_size(), model.horizon());

    for (std::size_t r = 0; r < bundle.rows.size(); ++r) {
        const RowInfo& row = bundle.rows[r];
        double f = farkas_by_row[r];
        switch (row.kind) {
            case RowKind::Probability:
                break; // absorbed into the strict positivity margin
            case RowKind::Martingale:
                if (f != 0.0) cert.strategy.set_position(row.time, row.prefix, f);
                break;
            case RowKind::Instrument: {
                // buy-only multipliers are >= 0 up to solver roundoff;
                // clamp the noise instead of emitting a forbidden short
                if (!row.equality) f = std::max(f, 0.0);
                if (f == 0.0) break;
                StaticPosition pos;
                pos.instrument = row.instrument;
                pos.orientation = f >= 0.0 ? +1 : -1;
                pos.weight = std::abs(f);
                cert.statics.push_back(pos);
                break;
            }
            case RowKind::Marginal:
                // feasibility systems with marginal rows are not converted to
                // tradable certificates; the caller does not pass them here
                break;
        }
    }
    return cert;
}

} // namespace

double certify_arbitrage(const ArbitrageCertificate& cert, const PathGridModel& model,
                         const InstrumentSet& instruments, std::uint64_t max_paths) {
    for (const auto& pos : cert.statics) {
        if (pos.instrument < 0 || pos.instrument >= instruments.size()) {
            throw InvalidInstance("certificate references an unknown instrument");
        }
        const auto side = instruments.instruments[static_cast<std::size_t>(pos.instrument)].side;
        if (pos.orientation == -1 && side != Side::TwoSided) {
            throw InvalidInstance("certificate shorts a buy-only instrument");
        }
        if (pos.weight < 0.0) throw InvalidInstance("certificate weights must be nonnegative");
    }
    const std::uint64_t n = model.path_count_checked(max_paths);
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    double min_gain = std::numeric_limits<double>::infinity();
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        double f = cert.strategy.empty() ? 0.0 : cert.strategy.gain(model, idx);
        for (const auto& pos : cert.statics) {
            const auto& inst = instruments.instruments[static_cast<std::size_t>(pos.instrument)];
            const double phi = evaluate_on_indices(inst.payoff, model, idx, p) - inst.price;
            f += pos.weight * pos.orientation * phi;
        }
        min_gain = std::min(min_gain, f);
    }
    return min_gain;
}

FtapVerdict check(const PathGridModel& model, const InstrumentSet& instruments,
                  const lp::LpTolerances& tol, std::uint64_t max_paths) {
    const ConstraintBundle bundle = build_constraints(model, instruments, {}, max_paths);

    // pure feasibility: minimize 0 over the bundle
    std::vector<double> zero(bundle.num_paths, 0.0);
    const lp::LinearProgram lp = bundle.to_lp(zero);
    const lp::LpSolution sol = lp::solve(lp, tol);

    FtapVerdict verdict;
    verdict.growth_witness_present = instruments.growth_witness.has_value();

    if (sol.status == lp::LpStatus::Optimal) {
        verdict.feasible = true;
        verdict.measure.weights = sol.primal;
        verdict.measure_report = verify_measure(verdict.measure, bundle);
        if (!verdict.measure_report.pass(10.0 * tol.feas)) {
            std::ostringstream os;
            os << "feasible vertex failed independent recheck (max violation "
               << verdict.measure_report.max_violation() << ")";
            throw NumericalFailure(os.str());
        }
        return verdict;
    }
    if (sol.status == lp::LpStatus::Unbounded) {
        throw NumericalFailure("feasibility problem reported unbounded");
    }

    // map the Farkas ray back to canonical bundle rows
    std::vector<double> by_row(bundle.rows.size(), 0.0);
    const auto eq_ids = bundle.eq_row_ids();
    const auto ineq_ids = bundle.ineq_row_ids();
    for (std::size_t i = 0; i < eq_ids.size(); ++i) {
        by_row[static_cast<std::size_t>(eq_ids[i])] = sol.farkas_eq[i];
    }
    for (std::size_t i = 0; i < ineq_ids.size(); ++i) {
        by_row[static_cast<std::size_t>(ineq_ids[i])] = sol.farkas_ineq[i];
    }
    verdict.feasible = false;
    verdict.certificate = certificate_from_farkas(bundle, by_row);
    verdict.certificate.min_gain =
        certify_arbitrage(verdict.certificate, model, instruments, max_paths);
    if (!(verdict.certificate.min_gain > tol.feas)) {
        std::ostringstream os;
        os << "arbitrage certificate failed independent recheck (min gain "
           << verdict.certificate.min_gain << ")";
        throw NumericalFailure(os.str());
    }
    return verdict;
}

} // namespace gridhedge
