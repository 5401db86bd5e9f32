#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-echelon reduction of the equality block; returns the indices of an
/// independent row subset and flags inconsistency (0 = nonzero).
struct EqBasis {
    std::vector<int> rows;
    bool inconsistent = false;
};

EqBasis independent_eq_rows(const DenseSystem& sys, double tol) {
    EqBasis out;
    const int n = sys.n;
    std::vector<std::vector<double>> work; // echelon rows, one pivot column each
    std::vector<int> pivot_col;
    std::vector<double> rhs;
    for (std::size_t r = 0; r < sys.eq_rows.size(); ++r) {
        std::vector<double> row = sys.eq_rows[r];
        double b = sys.eq_rhs[r];
        // eliminate against the accepted rows using their pivot columns
        for (std::size_t k = 0; k < work.size(); ++k) {
            const int piv = pivot_col[k];
            const double f =
                row[static_cast<std::size_t>(piv)] / work[k][static_cast<std::size_t>(piv)];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                row[static_cast<std::size_t>(j)] -= f * work[k][static_cast<std::size_t>(j)];
            }
            b -= f * rhs[k];
        }
        // largest remaining entry decides rank membership and the pivot
        int best = -1;
        double scale = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = std::abs(row[static_cast<std::size_t>(j)]);
            if (v > scale) {
                scale = v;
                best = j;
            }
        }
        double row_norm = 0.0;
        for (double v : sys.eq_rows[r]) row_norm = std::max(row_norm, std::abs(v));
        if (scale > tol * (1.0 + row_norm)) {
            work.push_back(row);
            pivot_col.push_back(best);
            rhs.push_back(b);
            out.rows.push_back(static_cast<int>(r));
        } else if (std::abs(b) > tol * (1.0 + std::abs(sys.eq_rhs[r]))) {
            out.inconsistent = true;
            return out;
        }
    }
    return out;
}

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x, double tol) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < tol) return false;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) {
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    x.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] =
            b[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    return true;
}

bool feasible_point(const DenseSystem& sys, const std::vector<double>& x, double tol) {
    for (std::size_t r = 0; r < sys.eq_rows.size(); ++r) {
        double acc = 0.0;
        for (int j = 0; j < sys.n; ++j) {
            acc += sys.eq_rows[r][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        }
        if (std::abs(acc - sys.eq_rhs[r]) > tol * (1.0 + std::abs(sys.eq_rhs[r]))) return false;
    }
    for (std::size_t r = 0; r < sys.ineq_rows.size(); ++r) {
        double acc = 0.0;
        for (int j = 0; j < sys.n; ++j) {
            acc += sys.ineq_rows[r][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        }
        if (acc > sys.ineq_rhs[r] + tol * (1.0 + std::abs(sys.ineq_rhs[r]))) return false;
    }
    for (int j = 0; j < sys.n; ++j) {
        if (x[static_cast<std::size_t>(j)] < sys.lower[static_cast<std::size_t>(j)] - tol) return false;
        if (x[static_cast<std::size_t>(j)] > sys.upper[static_cast<std::size_t>(j)] + tol) return false;
    }
    return true;
}

} // namespace

std::vector<std::vector<double>> enumerate_vertices(const DenseSystem& sys, double tol) {
    std::vector<std::vector<double>> vertices;
    const int n = sys.n;

    const EqBasis eq = independent_eq_rows(sys, 1e-11);
    if (eq.inconsistent) return vertices;
    const int need = n - static_cast<int>(eq.rows.size());
    if (need < 0) {
        // over-determined equalities: no vertex unless they collapse; the
        // reduction above keeps only independent rows, so need >= 0 always
        return vertices;
    }

    // candidate active rows: inequalities then finite bounds
    struct Candidate {
        std::vector<double> row;
        double rhs;
    };
    std::vector<Candidate> cands;
    for (std::size_t r = 0; r < sys.ineq_rows.size(); ++r) {
        cands.push_back({sys.ineq_rows[r], sys.ineq_rhs[r]});
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(sys.lower[static_cast<std::size_t>(j)])) {
            std::vector<double> row(static_cast<std::size_t>(n), 0.0);
            row[static_cast<std::size_t>(j)] = 1.0;
            cands.push_back({row, sys.lower[static_cast<std::size_t>(j)]});
        }
        if (std::isfinite(sys.upper[static_cast<std::size_t>(j)])) {
            std::vector<double> row(static_cast<std::size_t>(n), 0.0);
            row[static_cast<std::size_t>(j)] = 1.0;
            cands.push_back({row, sys.upper[static_cast<std::size_t>(j)]});
        }
    }
    const int m = static_cast<int>(cands.size());
    if (need > m) return vertices;

    auto push_unique = [&](const std::vector<double>& x) {
        for (const auto& v : vertices) {
            double dist = 0.0;
            for (int j = 0; j < n; ++j) {
                dist = std::max(dist, std::abs(v[static_cast<std::size_t>(j)] -
                                               x[static_cast<std::size_t>(j)]));
            }
            if (dist <= 1e-8) return;
        }
        vertices.push_back(x);
    };

    std::vector<std::vector<double>> base_rows;
    std::vector<double> base_rhs;
    for (int r : eq.rows) {
        base_rows.push_back(sys.eq_rows[static_cast<std::size_t>(r)]);
        base_rhs.push_back(sys.eq_rhs[static_cast<std::size_t>(r)]);
    }

    // iterate over all size-`need` subsets of the candidates
    std::vector<int> pick(static_cast<std::size_t>(need));
    for (int i = 0; i < need; ++i) pick[static_cast<std::size_t>(i)] = i;
    std::vector<double> x;
    while (true) {
        std::vector<std::vector<double>> a = base_rows;
        std::vector<double> b = base_rhs;
        for (int i : pick) {
            a.push_back(cands[static_cast<std::size_t>(i)].row);
            b.push_back(cands[static_cast<std::size_t>(i)].rhs);
        }
        if (static_cast<int>(a.size()) == n && solve_square(a, b, x, 1e-11) &&
            feasible_point(sys, x, tol)) {
            push_unique(x);
        }
        if (need == 0) break;
        // next combination
        int i = need - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - need + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < need; ++k) {
            pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
        }
    }
    return vertices;
}

Range objective_range(const DenseSystem& sys, std::span<const double> objective, double tol) {
    Range out;
    for (const auto& v : enumerate_vertices(sys, tol)) {
        double acc = 0.0;
        for (int j = 0; j < sys.n; ++j) {
            acc += objective[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
        }
        if (!out.feasible) {
            out.feasible = true;
            out.lower = out.upper = acc;
        } else {
            out.lower = std::min(out.lower, acc);
            out.upper = std::max(out.upper, acc);
        }
    }
    return out;
}

DenseSystem measure_system(const gridhedge::PathGridModel& model,
                           const gridhedge::InstrumentSet& instruments,
                           const std::vector<gridhedge::Marginal>& marginals) {
    using namespace gridhedge;
    DenseSystem sys;
    const std::uint64_t n = model.path_count_checked();
    sys.n = static_cast<int>(n);
    sys.lower.assign(n, 0.0);
    sys.upper.assign(n, kInf);

    PathIndexer ix(model.grid_size(), model.horizon());
    const int T = model.horizon();
    std::vector<int> idx(static_cast<std::size_t>(T));

    auto empty_row = [&] { return std::vector<double>(n, 0.0); };

    std::vector<double> prob = empty_row();
    for (std::uint64_t p = 0; p < n; ++p) prob[p] = 1.0;
    sys.eq_rows.push_back(prob);
    sys.eq_rhs.push_back(1.0);

    for (int t = 0; t < T; ++t) {
        for (std::uint64_t q = 0; q < ix.prefix_count(t); ++q) {
            std::vector<double> row = empty_row();
            for (std::uint64_t p = 0; p < n; ++p) {
                if (ix.prefix_id(p, t) != q) continue;
                ix.decode(p, idx);
                const double prev =
                    t == 0 ? model.s0()
                           : model.levels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(t - 1)])];
                const double next =
                    model.levels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
                row[p] = next - prev;
            }
            sys.eq_rows.push_back(row);
            sys.eq_rhs.push_back(0.0);
        }
    }
    for (const auto& inst : instruments.instruments) {
        std::vector<double> row = empty_row();
        for (std::uint64_t p = 0; p < n; ++p) {
            ix.decode(p, idx);
            row[p] = evaluate_on_indices(inst.payoff, model, idx, p) - inst.price;
        }
        if (inst.side == Side::TwoSided) {
            sys.eq_rows.push_back(row);
            sys.eq_rhs.push_back(0.0);
        } else {
            sys.ineq_rows.push_back(row);
            sys.ineq_rhs.push_back(0.0);
        }
    }
    for (const auto& nu : marginals) {
        for (int l = 0; l < model.grid_size(); ++l) {
            std::vector<double> row = empty_row();
            for (std::uint64_t p = 0; p < n; ++p) {
                ix.decode(p, idx);
                if (idx[static_cast<std::size_t>(nu.date - 1)] == l) row[p] = 1.0;
            }
            sys.eq_rows.push_back(row);
            sys.eq_rhs.push_back(nu.masses[static_cast<std::size_t>(l)]);
        }
    }
    return sys;
}

std::vector<double> payoff_table(const gridhedge::Payoff& phi,
                                 const gridhedge::PathGridModel& model) {
    using namespace gridhedge;
    const std::uint64_t n = model.path_count_checked();
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    std::vector<double> values(n);
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        values[p] = evaluate_on_indices(phi, model, idx, p);
    }
    return values;
}

DenseSystem from_lp(const gridhedge::lp::LinearProgram& lp) {
    DenseSystem sys;
    sys.n = lp.num_vars;
    sys.eq_rows.assign(lp.eq_rhs.size(), std::vector<double>(static_cast<std::size_t>(sys.n), 0.0));
    sys.eq_rhs = lp.eq_rhs;
    sys.ineq_rows.assign(lp.ineq_rhs.size(),
                         std::vector<double>(static_cast<std::size_t>(sys.n), 0.0));
    sys.ineq_rhs = lp.ineq_rhs;
    for (const auto& t : lp.eq) {
        sys.eq_rows[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] += t.value;
    }
    for (const auto& t : lp.ineq) {
        sys.ineq_rows[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] += t.value;
    }
    sys.lower = lp.lower.empty() ? std::vector<double>(static_cast<std::size_t>(sys.n), 0.0)
                                 : lp.lower;
    sys.upper = lp.upper.empty() ? std::vector<double>(static_cast<std::size_t>(sys.n), kInf)
                                 : lp.upper;
    return sys;
}

} // namespace oracle
