#include "gridhedge/martingale_lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gridhedge {

double PathMeasure::expectation(std::span<const double> values) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
    return acc;
}

double MeasureCheckReport::max_violation() const {
    return std::max({negativity, probability, martingale, instrument, marginal});
}

ConstraintBundle build_constraints(const PathGridModel& model, const InstrumentSet& instruments,
                                   const std::vector<Marginal>& marginals,
                                   std::uint64_t max_paths) {
    instruments.validate(model);
    std::set<int> seen_dates;
    for (const auto& nu : marginals) {
        nu.validate(model);
        if (!seen_dates.insert(nu.date).second) {
            throw InvalidInstance("duplicate marginal date");
        }
    }

    ConstraintBundle bundle{model, instruments, marginals, 0, {}, {}};
    std::sort(bundle.marginals.begin(), bundle.marginals.end(),
              [](const Marginal& a, const Marginal& b) { return a.date < b.date; });

    const int T = model.horizon();
    const int G = model.grid_size();
    const std::uint64_t n = model.path_count_checked(max_paths);
    bundle.num_paths = n;
    PathIndexer ix(G, T);

    // row layout: probability, martingale prefixes by length, instruments,
    // marginals by (date, level)
    RowInfo prob;
    prob.kind = RowKind::Probability;
    prob.rhs = 1.0;
    bundle.rows.push_back(prob);
    for (int t = 0; t < T; ++t) {
        for (std::uint64_t p = 0; p < ix.prefix_count(t); ++p) {
            RowInfo r;
            r.kind = RowKind::Martingale;
            r.time = t;
            r.prefix = p;
            bundle.rows.push_back(r);
        }
    }
    const int instr_row0 = bundle.num_rows();
    for (int i = 0; i < instruments.size(); ++i) {
        RowInfo r;
        r.kind = RowKind::Instrument;
        r.instrument = i;
        r.equality = instruments.instruments[static_cast<std::size_t>(i)].side == Side::TwoSided;
        bundle.rows.push_back(r);
    }
    const int marg_row0 = bundle.num_rows();
    for (const auto& nu : bundle.marginals) {
        for (int l = 0; l < G; ++l) {
            RowInfo r;
            r.kind = RowKind::Marginal;
            r.date = nu.date;
            r.level = l;
            r.rhs = nu.masses[static_cast<std::size_t>(l)];
            bundle.rows.push_back(r);
        }
    }

    bundle.entries.reserve(static_cast<std::size_t>(
        n * (1 + static_cast<std::uint64_t>(T) +
             static_cast<std::uint64_t>(instruments.size() + 4 * bundle.marginals.size()))));

    std::vector<int> idx(static_cast<std::size_t>(T));
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        const int col = static_cast<int>(p);
        bundle.entries.push_back({0, col, 1.0});
        // one martingale row per prefix length: coefficient x_{t+1} - x_t
        double prev = model.s0();
        for (int t = 0; t < T; ++t) {
            const double next = model.levels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
            const double coeff = next - prev;
            if (coeff != 0.0) {
                const int row = static_cast<int>(1 + ix.prefix_offset(t) + ix.prefix_id(p, t));
                bundle.entries.push_back({row, col, coeff});
            }
            prev = next;
        }
        for (int i = 0; i < instruments.size(); ++i) {
            const auto& inst = instruments.instruments[static_cast<std::size_t>(i)];
            const double phi = evaluate_on_indices(inst.payoff, model, idx, p) - inst.price;
            if (phi != 0.0) {
                bundle.entries.push_back({instr_row0 + i, col, phi});
            }
        }
        int row = marg_row0;
        for (const auto& nu : bundle.marginals) {
            const int level_at_date = idx[static_cast<std::size_t>(nu.date - 1)];
            bundle.entries.push_back({row + level_at_date, col, 1.0});
            row += G;
        }
    }
    return bundle;
}

lp::LinearProgram ConstraintBundle::to_lp(std::span<const double> objective) const {
    lp::LinearProgram lp;
    lp.num_vars = static_cast<int>(num_paths);
    lp.objective.assign(objective.begin(), objective.end());
    // pi >= 0 is the default bound block

    // canonical row -> (block, position)
    std::vector<int> eq_pos(rows.size(), -1), ineq_pos(rows.size(), -1);
    int ne = 0, ni = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].equality) {
            eq_pos[r] = ne++;
        } else {
            ineq_pos[r] = ni++;
        }
    }
    lp.eq_rhs.resize(static_cast<std::size_t>(ne));
    lp.ineq_rhs.resize(static_cast<std::size_t>(ni));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].equality) {
            lp.eq_rhs[static_cast<std::size_t>(eq_pos[r])] = rows[r].rhs;
        } else {
            lp.ineq_rhs[static_cast<std::size_t>(ineq_pos[r])] = rows[r].rhs;
        }
    }
    lp.eq.reserve(entries.size());
    for (const auto& t : entries) {
        const auto r = static_cast<std::size_t>(t.row);
        if (rows[r].equality) {
            lp.eq.push_back({eq_pos[r], t.col, t.value});
        } else {
            lp.ineq.push_back({ineq_pos[r], t.col, t.value});
        }
    }
    return lp;
}

std::vector<int> ConstraintBundle::eq_row_ids() const {
    std::vector<int> ids;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].equality) ids.push_back(static_cast<int>(r));
    }
    return ids;
}

std::vector<int> ConstraintBundle::ineq_row_ids() const {
    std::vector<int> ids;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].equality) ids.push_back(static_cast<int>(r));
    }
    return ids;
}

MeasureCheckReport verify_measure(const PathMeasure& pi, const ConstraintBundle& bundle) {
    MeasureCheckReport report;
    const auto& model = bundle.model;
    const int T = model.horizon();
    const int G = model.grid_size();
    PathIndexer ix(G, T);
    const std::uint64_t n = bundle.num_paths;
    if (pi.weights.size() != n) {
        throw InvalidInstance("measure dimension does not match the bundle");
    }

    double total = 0.0;
    for (double w : pi.weights) {
        report.negativity = std::max(report.negativity, -w);
        total += w;
    }
    report.probability = std::abs(total - 1.0);

    std::vector<double> mart(ix.total_prefixes(), 0.0);
    std::vector<double> instr(static_cast<std::size_t>(bundle.instruments.size()), 0.0);
    std::vector<double> marg(bundle.marginals.size() * static_cast<std::size_t>(G), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(T));
    for (std::uint64_t p = 0; p < n; ++p) {
        const double w = pi.weights[p];
        if (w == 0.0) continue;
        ix.decode(p, idx);
        double prev = model.s0();
        for (int t = 0; t < T; ++t) {
            const double next = model.levels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
            mart[ix.prefix_offset(t) + ix.prefix_id(p, t)] += w * (next - prev);
            prev = next;
        }
        for (int i = 0; i < bundle.instruments.size(); ++i) {
            const auto& inst = bundle.instruments.instruments[static_cast<std::size_t>(i)];
            instr[static_cast<std::size_t>(i)] +=
                w * (evaluate_on_indices(inst.payoff, model, idx, p) - inst.price);
        }
        for (std::size_t k = 0; k < bundle.marginals.size(); ++k) {
            const int level_at_date =
                idx[static_cast<std::size_t>(bundle.marginals[k].date - 1)];
            marg[k * static_cast<std::size_t>(G) + static_cast<std::size_t>(level_at_date)] += w;
        }
    }
    for (double v : mart) report.martingale = std::max(report.martingale, std::abs(v));
    for (int i = 0; i < bundle.instruments.size(); ++i) {
        const bool two_sided =
            bundle.instruments.instruments[static_cast<std::size_t>(i)].side == Side::TwoSided;
        const double v = instr[static_cast<std::size_t>(i)];
        report.instrument = std::max(report.instrument, two_sided ? std::abs(v) : v);
    }
    for (std::size_t k = 0; k < bundle.marginals.size(); ++k) {
        for (int l = 0; l < G; ++l) {
            const double v = marg[k * static_cast<std::size_t>(G) + static_cast<std::size_t>(l)] -
                             bundle.marginals[k].masses[static_cast<std::size_t>(l)];
            report.marginal = std::max(report.marginal, std::abs(v));
        }
    }
    return report;
}

} // namespace gridhedge
