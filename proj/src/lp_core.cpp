#include "gridhedge/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "gridhedge/errors.hpp"

namespace gridhedge::lp {

namespace {

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper, FreeZero };

bool finite(double v) { return std::isfinite(v); }

/// The program rewritten as  min c'x, A x = b, lb <= x <= ub  with one slack
/// per inequality row and one artificial column per row. Equality rows come
/// first. Artificial columns are +-unit vectors and are kept implicit.
struct Standardized {
    int m = 0;
    int n_struct = 0;
    int n_slack = 0;
    int n_real = 0; // struct + slack; artificials are n_real..n_real+m-1
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<double> b;
    std::vector<double> lb, ub;
    std::vector<double> cost; // phase-2 objective on real variables
    double b_scale = 1.0;
};

Standardized standardize(const LinearProgram& lp) {
    Standardized s;
    const int n_eq = lp.num_eq();
    const int n_ineq = lp.num_ineq();
    s.m = n_eq + n_ineq;
    s.n_struct = lp.num_vars;
    s.n_slack = n_ineq;
    s.n_real = s.n_struct + s.n_slack;

    s.cols.assign(static_cast<std::size_t>(s.n_real), {});
    // Sum duplicate triplets per (row, col) while building the columns.
    std::vector<std::map<int, double>> acc(static_cast<std::size_t>(s.n_struct));
    for (const auto& t : lp.eq) acc[static_cast<std::size_t>(t.col)][t.row] += t.value;
    for (const auto& t : lp.ineq) acc[static_cast<std::size_t>(t.col)][n_eq + t.row] += t.value;
    for (int j = 0; j < s.n_struct; ++j) {
        auto& col = s.cols[static_cast<std::size_t>(j)];
        col.reserve(acc[static_cast<std::size_t>(j)].size());
        for (const auto& [row, v] : acc[static_cast<std::size_t>(j)]) {
            if (v != 0.0) col.emplace_back(row, v);
        }
    }
    for (int i = 0; i < n_ineq; ++i) {
        s.cols[static_cast<std::size_t>(s.n_struct + i)] = {{n_eq + i, 1.0}};
    }

    s.b.resize(static_cast<std::size_t>(s.m));
    for (int i = 0; i < n_eq; ++i) s.b[static_cast<std::size_t>(i)] = lp.eq_rhs[static_cast<std::size_t>(i)];
    for (int i = 0; i < n_ineq; ++i) s.b[static_cast<std::size_t>(n_eq + i)] = lp.ineq_rhs[static_cast<std::size_t>(i)];
    for (double v : s.b) s.b_scale = std::max(s.b_scale, std::abs(v));

    s.lb.assign(static_cast<std::size_t>(s.n_real), 0.0);
    s.ub.assign(static_cast<std::size_t>(s.n_real), kInf);
    for (int j = 0; j < s.n_struct; ++j) {
        s.lb[static_cast<std::size_t>(j)] = lp.lower.empty() ? 0.0 : lp.lower[static_cast<std::size_t>(j)];
        s.ub[static_cast<std::size_t>(j)] = lp.upper.empty() ? kInf : lp.upper[static_cast<std::size_t>(j)];
    }

    s.cost.assign(static_cast<std::size_t>(s.n_real), 0.0);
    for (int j = 0; j < s.n_struct; ++j) s.cost[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
    return s;
}

/// Internal signal: the factorized basis turned out singular, typically
/// because roundoff let a should-be-zero ratio-test pivot into the basis.
/// The caller restarts with a stricter pivot threshold.
struct SingularBasis {};

class Simplex {
  public:
    Simplex(const LinearProgram& lp, const LpTolerances& tol, double pivot_scale)
        : lp_(lp), tol_(tol), s_(standardize(lp)), pivot_tol_(tol.pivot * pivot_scale) {
        max_iter_ = tol_.max_iterations > 0
                        ? tol_.max_iterations
                        : 2000 + 60 * (s_.m + s_.n_real);
    }

    LpSolution run();

  private:
    // --- data -------------------------------------------------------------
    const LinearProgram& lp_;
    LpTolerances tol_;
    Standardized s_;

    std::vector<VarStatus> status_; // n_real + m entries (artificials last)
    std::vector<double> x_;
    std::vector<int> basis_;    // basis_[row] = variable index
    std::vector<int> art_sign_; // sign of the artificial column per row
    std::vector<double> binv_;  // dense m x m, row-major
    std::vector<double> y_;     // duals of the current phase cost
    std::vector<double> dvec_;  // scratch: Binv * A_j
    bool phase1_ = true;
    int iterations_ = 0;
    int max_iter_ = 0;
    int pivots_since_refactor_ = 0;
    double pivot_tol_ = 1e-10;

    int num_art() const { return s_.m; }
    int n_all() const { return s_.n_real + num_art(); }
    bool is_artificial(int j) const { return j >= s_.n_real; }

    double lb_of(int j) const { return is_artificial(j) ? 0.0 : s_.lb[static_cast<std::size_t>(j)]; }
    double ub_of(int j) const {
        if (is_artificial(j)) return phase1_ ? kInf : 0.0;
        return s_.ub[static_cast<std::size_t>(j)];
    }
    double cost_of(int j) const {
        if (phase1_) return is_artificial(j) ? 1.0 : 0.0;
        return is_artificial(j) ? 0.0 : s_.cost[static_cast<std::size_t>(j)];
    }

    // --- linear algebra ----------------------------------------------------
    void ftran(int j, std::vector<double>& d) const; // d = Binv * column_j
    double price_column(int j) const;                // y' * column_j
    void refactorize();
    void recompute_basics();
    void compute_duals();

    // --- simplex steps ------------------------------------------------------
    int pick_entering(int& sigma, double& zj);
    bool iterate(bool& unbounded, int& unbounded_col, int& unbounded_sigma);
    void pivot(int enter, int sigma, int row, double step, const std::vector<double>& d);
    void drive_out_artificials();
    bool optimize_phase(bool& unbounded, int& unbounded_col, int& unbounded_sigma);

    [[noreturn]] void fail(const std::string& msg) const {
        throw gridhedge::NumericalFailure("lp_core: " + msg);
    }

    LpSolution make_infeasible();
    LpSolution make_unbounded(int col, int sigma, const std::vector<double>& d);
    LpSolution make_optimal();
};

void Simplex::ftran(int j, std::vector<double>& d) const {
    const int m = s_.m;
    d.assign(static_cast<std::size_t>(m), 0.0);
    if (is_artificial(j)) {
        const int row = j - s_.n_real;
        const double sgn = art_sign_[static_cast<std::size_t>(row)];
        for (int k = 0; k < m; ++k) {
            d[static_cast<std::size_t>(k)] = sgn * binv_[static_cast<std::size_t>(k) * m + row];
        }
        return;
    }
    for (const auto& [row, v] : s_.cols[static_cast<std::size_t>(j)]) {
        for (int k = 0; k < m; ++k) {
            d[static_cast<std::size_t>(k)] += binv_[static_cast<std::size_t>(k) * m + row] * v;
        }
    }
}

double Simplex::price_column(int j) const {
    if (is_artificial(j)) {
        const int row = j - s_.n_real;
        return y_[static_cast<std::size_t>(row)] * art_sign_[static_cast<std::size_t>(row)];
    }
    double acc = 0.0;
    for (const auto& [row, v] : s_.cols[static_cast<std::size_t>(j)]) {
        acc += y_[static_cast<std::size_t>(row)] * v;
    }
    return acc;
}

void Simplex::refactorize() {
    const int m = s_.m;
    if (m == 0) return;
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
        const int j = basis_[static_cast<std::size_t>(k)];
        if (is_artificial(j)) {
            const int row = j - s_.n_real;
            a[static_cast<std::size_t>(row) * m + k] = art_sign_[static_cast<std::size_t>(row)];
        } else {
            for (const auto& [row, v] : s_.cols[static_cast<std::size_t>(j)]) {
                a[static_cast<std::size_t>(row) * m + k] = v;
            }
        }
    }
    std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<std::size_t>(col) * m + col]);
        for (int r = col + 1; r < m; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r) * m + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-12) throw SingularBasis{};
        if (piv != col) {
            for (int c = 0; c < m; ++c) {
                std::swap(a[static_cast<std::size_t>(piv) * m + c], a[static_cast<std::size_t>(col) * m + c]);
                std::swap(inv[static_cast<std::size_t>(piv) * m + c], inv[static_cast<std::size_t>(col) * m + c]);
            }
        }
        const double p = a[static_cast<std::size_t>(col) * m + col];
        const double ip = 1.0 / p;
        for (int c = 0; c < m; ++c) {
            a[static_cast<std::size_t>(col) * m + c] *= ip;
            inv[static_cast<std::size_t>(col) * m + c] *= ip;
        }
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r) * m + col];
            if (f == 0.0) continue;
            for (int c = 0; c < m; ++c) {
                a[static_cast<std::size_t>(r) * m + c] -= f * a[static_cast<std::size_t>(col) * m + c];
                inv[static_cast<std::size_t>(r) * m + c] -= f * inv[static_cast<std::size_t>(col) * m + c];
            }
        }
    }
    binv_ = std::move(inv);
    pivots_since_refactor_ = 0;
}

void Simplex::recompute_basics() {
    const int m = s_.m;
    // residual of the nonbasic part: r = b - sum_{nonbasic} A_j x_j
    std::vector<double> r = s_.b;
    for (int j = 0; j < n_all(); ++j) {
        if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) continue;
        const double xv = x_[static_cast<std::size_t>(j)];
        if (xv == 0.0) continue;
        if (is_artificial(j)) {
            const int row = j - s_.n_real;
            r[static_cast<std::size_t>(row)] -= art_sign_[static_cast<std::size_t>(row)] * xv;
        } else {
            for (const auto& [row, v] : s_.cols[static_cast<std::size_t>(j)]) {
                r[static_cast<std::size_t>(row)] -= v * xv;
            }
        }
    }
    for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
            acc += binv_[static_cast<std::size_t>(k) * m + i] * r[static_cast<std::size_t>(i)];
        }
        x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] = acc;
    }
}

void Simplex::compute_duals() {
    const int m = s_.m;
    y_.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
        const double cb = cost_of(basis_[static_cast<std::size_t>(k)]);
        if (cb == 0.0) continue;
        for (int i = 0; i < m; ++i) {
            y_[static_cast<std::size_t>(i)] += cb * binv_[static_cast<std::size_t>(k) * m + i];
        }
    }
}

int Simplex::pick_entering(int& sigma, double& zj) {
    // Bland: the eligible variable with the smallest index enters. The
    // threshold sits a decade inside the published feasibility tolerance so
    // certified dual residuals clear their checks with margin.
    const double ztol = 0.1 * tol_.feas;
    for (int j = 0; j < s_.n_real; ++j) {
        const auto st = status_[static_cast<std::size_t>(j)];
        if (st == VarStatus::Basic) continue;
        if (lb_of(j) == ub_of(j)) continue; // fixed
        const double z = cost_of(j) - price_column(j);
        switch (st) {
            case VarStatus::AtLower:
                if (z < -ztol) {
                    sigma = +1;
                    zj = z;
                    return j;
                }
                break;
            case VarStatus::AtUpper:
                if (z > ztol) {
                    sigma = -1;
                    zj = z;
                    return j;
                }
                break;
            case VarStatus::FreeZero:
                if (z < -ztol) {
                    sigma = +1;
                    zj = z;
                    return j;
                }
                if (z > ztol) {
                    sigma = -1;
                    zj = z;
                    return j;
                }
                break;
            case VarStatus::Basic:
                break;
        }
    }
    return -1;
}

void Simplex::pivot(int enter, int sigma, int row, double step, const std::vector<double>& d) {
    const int m = s_.m;
    // move the entering variable and every basic variable
    x_[static_cast<std::size_t>(enter)] += sigma * step;
    for (int k = 0; k < m; ++k) {
        x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] -=
            sigma * step * d[static_cast<std::size_t>(k)];
    }
    if (row < 0) {
        // bound flip: the entering variable hit its opposite bound
        auto& st = status_[static_cast<std::size_t>(enter)];
        st = (st == VarStatus::AtLower) ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[static_cast<std::size_t>(enter)] =
            (st == VarStatus::AtLower) ? lb_of(enter) : ub_of(enter);
        return;
    }
    const int leave = basis_[static_cast<std::size_t>(row)];
    // the leaving variable rests exactly on the bound it reached
    const double dl = sigma * d[static_cast<std::size_t>(row)];
    if (dl > 0.0) {
        status_[static_cast<std::size_t>(leave)] = VarStatus::AtLower;
        x_[static_cast<std::size_t>(leave)] = lb_of(leave);
    } else {
        status_[static_cast<std::size_t>(leave)] = VarStatus::AtUpper;
        x_[static_cast<std::size_t>(leave)] = ub_of(leave);
    }
    basis_[static_cast<std::size_t>(row)] = enter;
    status_[static_cast<std::size_t>(enter)] = VarStatus::Basic;

    // product-form update of the explicit inverse
    const double p = d[static_cast<std::size_t>(row)];
    const double ip = 1.0 / p;
    for (int c = 0; c < m; ++c) binv_[static_cast<std::size_t>(row) * m + c] *= ip;
    for (int k = 0; k < m; ++k) {
        if (k == row) continue;
        const double f = d[static_cast<std::size_t>(k)];
        if (f == 0.0) continue;
        for (int c = 0; c < m; ++c) {
            binv_[static_cast<std::size_t>(k) * m + c] -=
                f * binv_[static_cast<std::size_t>(row) * m + c];
        }
    }
    ++pivots_since_refactor_;
}

/// One simplex iteration. Returns false when the current phase is optimal.
bool Simplex::iterate(bool& unbounded, int& unbounded_col, int& unbounded_sigma) {
    if (pivots_since_refactor_ >= 32) {
        refactorize();
        recompute_basics();
    }
    compute_duals();
    int sigma = 0;
    double zj = 0.0;
    const int enter = pick_entering(sigma, zj);
    if (enter < 0) return false;

    ftran(enter, dvec_);
    // entries negligible relative to the column are treated as exact zeros;
    // pivoting on them is what manufactures singular bases
    double dscale = 1.0;
    for (double v : dvec_) dscale = std::max(dscale, std::abs(v));
    const double delta_tol = pivot_tol_ * dscale;

    // ratio test over the basic variables plus the entering variable's span
    double best_t = kInf;
    int best_row = -1; // -1 encodes the bound flip
    int best_var = n_all();
    const double span = ub_of(enter) - lb_of(enter);
    if (finite(span)) {
        best_t = span;
        best_row = -1;
        best_var = enter;
    }
    for (int k = 0; k < s_.m; ++k) {
        const double delta = -static_cast<double>(sigma) * dvec_[static_cast<std::size_t>(k)];
        if (std::abs(delta) <= delta_tol) continue;
        const int bvar = basis_[static_cast<std::size_t>(k)];
        double t;
        if (delta < 0.0) {
            const double lo = lb_of(bvar);
            if (!finite(lo)) continue;
            t = (x_[static_cast<std::size_t>(bvar)] - lo) / (-delta);
        } else {
            const double hi = ub_of(bvar);
            if (!finite(hi)) continue;
            t = (hi - x_[static_cast<std::size_t>(bvar)]) / delta;
        }
        if (t < 0.0) t = 0.0; // degeneracy beyond the bound by roundoff
        if (!finite(best_t)) {
            best_t = t;
            best_row = k;
            best_var = bvar;
            continue;
        }
        // Bland tie-break: strictly better ratio, or equal ratio with a
        // smaller variable index.
        const double tie = 1e-12 * (1.0 + best_t);
        if (t < best_t - tie || (t <= best_t + tie && bvar < best_var)) {
            best_t = t;
            best_row = k;
            best_var = bvar;
        }
    }

    if (!finite(best_t)) {
        unbounded = true;
        unbounded_col = enter;
        unbounded_sigma = sigma;
        return false;
    }
    pivot(enter, sigma, best_row, best_t, dvec_);
    ++iterations_;
    return true;
}

/// Runs the current phase to certified optimality: iterate until no entering
/// candidate, then refactorize and recheck the duals on fresh numerics,
/// resuming if drift in the running inverse had hidden a candidate. Returns
/// false when the phase detected an unbounded direction instead.
bool Simplex::optimize_phase(bool& unbounded, int& unbounded_col, int& unbounded_sigma) {
    for (int round = 0; round < 30; ++round) {
        while (iterate(unbounded, unbounded_col, unbounded_sigma)) {
            if (iterations_ > max_iter_) {
                fail(phase1_ ? "iteration limit exceeded in phase 1"
                             : "iteration limit exceeded in phase 2");
            }
        }
        if (unbounded) return false;
        refactorize();
        recompute_basics();
        compute_duals();
        int sigma = 0;
        double zj = 0.0;
        if (pick_entering(sigma, zj) < 0) return true;
    }
    fail("optimality did not stabilize under refactorization");
}

/// Replaces basic artificials by real columns where a usable pivot exists.
/// Rows that stay with a basic artificial are (numerically) redundant.
void Simplex::drive_out_artificials() {
    for (int k = 0; k < s_.m; ++k) {
        const int bvar = basis_[static_cast<std::size_t>(k)];
        if (!is_artificial(bvar)) continue;
        for (int j = 0; j < s_.n_real; ++j) {
            if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) continue;
            if (lb_of(j) == ub_of(j)) continue;
            ftran(j, dvec_);
            if (std::abs(dvec_[static_cast<std::size_t>(k)]) > 1e-7) {
                // degenerate exchange: the artificial sits at ~0
                x_[static_cast<std::size_t>(bvar)] = 0.0;
                pivot(j, +1, k, 0.0, dvec_);
                break;
            }
        }
    }
    refactorize();
    recompute_basics();
}

LpSolution Simplex::run() {
    const int m = s_.m;
    status_.assign(static_cast<std::size_t>(n_all()), VarStatus::AtLower);
    x_.assign(static_cast<std::size_t>(n_all()), 0.0);
    basis_.assign(static_cast<std::size_t>(m), -1);
    art_sign_.assign(static_cast<std::size_t>(m), 1);

    for (int j = 0; j < s_.n_real; ++j) {
        const double lo = s_.lb[static_cast<std::size_t>(j)];
        const double hi = s_.ub[static_cast<std::size_t>(j)];
        if (finite(lo)) {
            status_[static_cast<std::size_t>(j)] = VarStatus::AtLower;
            x_[static_cast<std::size_t>(j)] = lo;
        } else if (finite(hi)) {
            status_[static_cast<std::size_t>(j)] = VarStatus::AtUpper;
            x_[static_cast<std::size_t>(j)] = hi;
        } else {
            status_[static_cast<std::size_t>(j)] = VarStatus::FreeZero;
            x_[static_cast<std::size_t>(j)] = 0.0;
        }
    }

    // crash basis: slacks absorb inequality rows with nonnegative residual,
    // artificials take the rest
    std::vector<double> r = s_.b;
    for (int j = 0; j < s_.n_real; ++j) {
        const double xv = x_[static_cast<std::size_t>(j)];
        if (xv == 0.0) continue;
        for (const auto& [row, v] : s_.cols[static_cast<std::size_t>(j)]) {
            r[static_cast<std::size_t>(row)] -= v * xv;
        }
    }
    bool any_artificial = false;
    for (int i = 0; i < m; ++i) {
        const bool ineq_row = i >= lp_.num_eq();
        if (ineq_row && r[static_cast<std::size_t>(i)] >= 0.0) {
            const int slack = s_.n_struct + (i - lp_.num_eq());
            basis_[static_cast<std::size_t>(i)] = slack;
            status_[static_cast<std::size_t>(slack)] = VarStatus::Basic;
            x_[static_cast<std::size_t>(slack)] = r[static_cast<std::size_t>(i)];
        } else {
            const int art = s_.n_real + i;
            art_sign_[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] >= 0.0 ? 1 : -1;
            basis_[static_cast<std::size_t>(i)] = art;
            status_[static_cast<std::size_t>(art)] = VarStatus::Basic;
            x_[static_cast<std::size_t>(art)] = std::abs(r[static_cast<std::size_t>(i)]);
            any_artificial = true;
        }
    }
    refactorize();
    recompute_basics();

    // ---- phase 1 ----
    phase1_ = true;
    if (any_artificial) {
        bool unbounded = false;
        int ucol = -1, usigma = 0;
        if (!optimize_phase(unbounded, ucol, usigma)) fail("phase 1 reported unbounded");
        double infeas = 0.0;
        for (int i = 0; i < m; ++i) {
            infeas += std::max(0.0, x_[static_cast<std::size_t>(s_.n_real + i)]);
        }
        if (infeas > tol_.feas * s_.b_scale) {
            compute_duals();
            return make_infeasible();
        }
        // pin the artificials to [0, 0] before exchanging them out, so a
        // leaving artificial always lands on a zero bound
        phase1_ = false;
        drive_out_artificials();
    }

    // ---- phase 2 ----
    phase1_ = false;
    for (int i = 0; i < m; ++i) {
        const int art = s_.n_real + i;
        if (status_[static_cast<std::size_t>(art)] != VarStatus::Basic) {
            x_[static_cast<std::size_t>(art)] = 0.0;
        }
    }
    bool unbounded = false;
    int ucol = -1, usigma = 0;
    if (!optimize_phase(unbounded, ucol, usigma)) {
        ftran(ucol, dvec_);
        return make_unbounded(ucol, usigma, dvec_);
    }
    return make_optimal();
}

LpSolution Simplex::make_infeasible() {
    // Phase-1 duals turned into a Farkas ray; see the header for the
    // published sign convention (f := -y so that b'f is negative).
    LpSolution sol;
    sol.status = LpStatus::Infeasible;
    sol.iterations = iterations_;
    sol.farkas_eq.resize(static_cast<std::size_t>(lp_.num_eq()));
    sol.farkas_ineq.resize(static_cast<std::size_t>(lp_.num_ineq()));
    double scale = 0.0;
    for (int i = 0; i < s_.m; ++i) scale = std::max(scale, std::abs(y_[static_cast<std::size_t>(i)]));
    if (scale <= 0.0) fail("degenerate Farkas ray");
    for (int i = 0; i < lp_.num_eq(); ++i) {
        sol.farkas_eq[static_cast<std::size_t>(i)] = -y_[static_cast<std::size_t>(i)] / scale;
    }
    for (int i = 0; i < lp_.num_ineq(); ++i) {
        sol.farkas_ineq[static_cast<std::size_t>(i)] =
            -y_[static_cast<std::size_t>(lp_.num_eq() + i)] / scale;
    }
    return sol;
}

LpSolution Simplex::make_unbounded(int col, int sigma, const std::vector<double>& d) {
    LpSolution sol;
    sol.status = LpStatus::Unbounded;
    sol.iterations = iterations_;
    sol.ray.assign(static_cast<std::size_t>(s_.n_struct), 0.0);
    if (col < s_.n_struct) sol.ray[static_cast<std::size_t>(col)] = sigma;
    for (int k = 0; k < s_.m; ++k) {
        const int bvar = basis_[static_cast<std::size_t>(k)];
        if (bvar < s_.n_struct) {
            sol.ray[static_cast<std::size_t>(bvar)] = -sigma * d[static_cast<std::size_t>(k)];
        }
    }
    double scale = 0.0;
    for (double v : sol.ray) scale = std::max(scale, std::abs(v));
    if (scale <= 0.0) fail("degenerate unbounded ray");
    for (double& v : sol.ray) v /= scale;
    return sol;
}

LpSolution Simplex::make_optimal() {
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.iterations = iterations_;
    sol.primal.assign(static_cast<std::size_t>(s_.n_struct), 0.0);
    for (int j = 0; j < s_.n_struct; ++j) sol.primal[static_cast<std::size_t>(j)] = x_[static_cast<std::size_t>(j)];
    sol.dual_eq.assign(y_.begin(), y_.begin() + lp_.num_eq());
    sol.dual_ineq.assign(y_.begin() + lp_.num_eq(), y_.end());

    double obj = 0.0;
    for (int j = 0; j < s_.n_struct; ++j) {
        obj += s_.cost[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    }
    sol.objective_value = obj;

    sol.reduced_costs.assign(static_cast<std::size_t>(s_.n_struct), 0.0);
    double dual_obj = 0.0;
    for (int i = 0; i < s_.m; ++i) {
        dual_obj += y_[static_cast<std::size_t>(i)] * s_.b[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < s_.n_real; ++j) {
        const double z = cost_of(j) - price_column(j);
        if (j < s_.n_struct) sol.reduced_costs[static_cast<std::size_t>(j)] = z;
        if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) continue;
        if (z > 0.0) {
            const double lo = lb_of(j);
            if (finite(lo)) dual_obj += z * lo;
        } else {
            const double hi = ub_of(j);
            if (finite(hi)) dual_obj += z * hi;
        }
    }
    sol.dual_objective = dual_obj;
    return sol;
}

} // namespace

void LinearProgram::validate() const {
    if (num_vars <= 0) throw InvalidInstance("lp: num_vars must be positive");
    if (static_cast<int>(objective.size()) != num_vars) {
        throw InvalidInstance("lp: objective size mismatch");
    }
    if (!lower.empty() && static_cast<int>(lower.size()) != num_vars) {
        throw InvalidInstance("lp: lower bound size mismatch");
    }
    if (!upper.empty() && static_cast<int>(upper.size()) != num_vars) {
        throw InvalidInstance("lp: upper bound size mismatch");
    }
    for (double v : objective) {
        if (std::isnan(v)) throw InvalidInstance("lp: NaN objective coefficient");
    }
    auto check_block = [&](const std::vector<Triplet>& ts, int rows, const char* which) {
        for (const auto& t : ts) {
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= num_vars) {
                throw InvalidInstance(std::string("lp: triplet index out of range in ") + which);
            }
            if (!std::isfinite(t.value)) {
                throw InvalidInstance(std::string("lp: non-finite coefficient in ") + which);
            }
        }
    };
    check_block(eq, num_eq(), "eq block");
    check_block(ineq, num_ineq(), "ineq block");
    for (double v : eq_rhs) {
        if (!std::isfinite(v)) throw InvalidInstance("lp: non-finite eq rhs");
    }
    for (double v : ineq_rhs) {
        if (!std::isfinite(v)) throw InvalidInstance("lp: non-finite ineq rhs");
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
        const double lo = lower[j];
        const double hi = upper.empty() ? kInf : upper[j];
        if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
            throw InvalidInstance("lp: invalid bounds");
        }
    }
}

LpSolution solve(const LinearProgram& lp, const LpTolerances& tol) {
    lp.validate();
    LpSolution sol;
    bool solved = false;
    // a singular factorization means roundoff corrupted the basis; restart
    // deterministically with stricter pivot screening before giving up
    for (double pivot_scale : {1.0, 1e3, 1e5}) {
        try {
            Simplex simplex(lp, tol, pivot_scale);
            sol = simplex.run();
            solved = true;
            break;
        } catch (const SingularBasis&) {
            continue;
        }
    }
    if (!solved) {
        throw NumericalFailure("lp_core: singular basis persisted across pivot tolerances");
    }
    // Certify before returning. A failed certificate is a solver bug or a
    // numerically hopeless instance; both must surface as errors.
    switch (sol.status) {
        case LpStatus::Optimal: {
            const LpCheck check = check_optimal(lp, sol);
            if (!check.certified(tol)) {
                std::ostringstream os;
                os << "lp_core: optimal solution failed certification (primal "
                   << check.primal_residual << ", dual " << check.dual_residual << ", gap "
                   << check.duality_gap << ", comp " << check.complementarity << ")";
                throw NumericalFailure(os.str());
            }
            break;
        }
        case LpStatus::Infeasible:
            if (farkas_margin(lp, sol) <= tol.feas) {
                throw NumericalFailure("lp_core: Farkas ray failed certification");
            }
            break;
        case LpStatus::Unbounded:
            if (ray_residual(lp, sol) > tol.feas) {
                throw NumericalFailure("lp_core: unbounded ray failed certification");
            }
            break;
    }
    return sol;
}

namespace {

/// g = A_eq' f_eq + A_ineq' f_ineq accumulated densely.
std::vector<double> transpose_apply(const LinearProgram& lp, const std::vector<double>& f_eq,
                                    const std::vector<double>& f_ineq) {
    std::vector<double> g(static_cast<std::size_t>(lp.num_vars), 0.0);
    for (const auto& t : lp.eq) {
        g[static_cast<std::size_t>(t.col)] += t.value * f_eq[static_cast<std::size_t>(t.row)];
    }
    for (const auto& t : lp.ineq) {
        g[static_cast<std::size_t>(t.col)] += t.value * f_ineq[static_cast<std::size_t>(t.row)];
    }
    return g;
}

double lower_of(const LinearProgram& lp, int j) {
    return lp.lower.empty() ? 0.0 : lp.lower[static_cast<std::size_t>(j)];
}
double upper_of(const LinearProgram& lp, int j) {
    return lp.upper.empty() ? kInf : lp.upper[static_cast<std::size_t>(j)];
}

} // namespace

LpCheck check_optimal(const LinearProgram& lp, const LpSolution& sol) {
    LpCheck out;
    const auto& x = sol.primal;

    std::vector<double> ax_eq(static_cast<std::size_t>(lp.num_eq()), 0.0);
    std::vector<double> ax_ineq(static_cast<std::size_t>(lp.num_ineq()), 0.0);
    for (const auto& t : lp.eq) {
        ax_eq[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
    }
    for (const auto& t : lp.ineq) {
        ax_ineq[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
    }
    for (int i = 0; i < lp.num_eq(); ++i) {
        out.primal_residual = std::max(
            out.primal_residual,
            std::abs(ax_eq[static_cast<std::size_t>(i)] - lp.eq_rhs[static_cast<std::size_t>(i)]));
    }
    for (int i = 0; i < lp.num_ineq(); ++i) {
        out.primal_residual =
            std::max(out.primal_residual, ax_ineq[static_cast<std::size_t>(i)] -
                                              lp.ineq_rhs[static_cast<std::size_t>(i)]);
        // multiplier sign and complementarity of the row
        const double yi = sol.dual_ineq[static_cast<std::size_t>(i)];
        out.dual_residual = std::max(out.dual_residual, yi);
        const double slack =
            lp.ineq_rhs[static_cast<std::size_t>(i)] - ax_ineq[static_cast<std::size_t>(i)];
        out.complementarity = std::max(out.complementarity, std::abs(yi * slack));
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        out.primal_residual =
            std::max(out.primal_residual, lower_of(lp, j) - x[static_cast<std::size_t>(j)]);
        out.primal_residual =
            std::max(out.primal_residual, x[static_cast<std::size_t>(j)] - upper_of(lp, j));
    }

    const std::vector<double> ay = transpose_apply(lp, sol.dual_eq, sol.dual_ineq);
    double dual_obj = 0.0;
    for (int i = 0; i < lp.num_eq(); ++i) {
        dual_obj += sol.dual_eq[static_cast<std::size_t>(i)] * lp.eq_rhs[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < lp.num_ineq(); ++i) {
        dual_obj +=
            sol.dual_ineq[static_cast<std::size_t>(i)] * lp.ineq_rhs[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        const double z = lp.objective[static_cast<std::size_t>(j)] - ay[static_cast<std::size_t>(j)];
        const double lo = lower_of(lp, j);
        const double hi = upper_of(lp, j);
        if (!finite(lo)) out.dual_residual = std::max(out.dual_residual, z);
        if (!finite(hi)) out.dual_residual = std::max(out.dual_residual, -z);
        if (z > 0.0) {
            if (finite(lo)) {
                dual_obj += z * lo;
                out.complementarity =
                    std::max(out.complementarity, z * (x[static_cast<std::size_t>(j)] - lo));
            }
        } else if (z < 0.0) {
            if (finite(hi)) {
                dual_obj += z * hi;
                out.complementarity =
                    std::max(out.complementarity, -z * (hi - x[static_cast<std::size_t>(j)]));
            }
        }
    }
    double primal_obj = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
        primal_obj += lp.objective[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    }
    out.duality_gap = std::abs(primal_obj - dual_obj);
    return out;
}

double farkas_margin(const LinearProgram& lp, const LpSolution& sol) {
    const auto& f_eq = sol.farkas_eq;
    const auto& f_ineq = sol.farkas_ineq;
    if (static_cast<int>(f_eq.size()) != lp.num_eq() ||
        static_cast<int>(f_ineq.size()) != lp.num_ineq()) {
        return -kInf;
    }
    for (double v : f_ineq) {
        if (v < -1e-12) return -kInf; // wrong sign on an inequality multiplier
    }
    const std::vector<double> g = transpose_apply(lp, f_eq, f_ineq);
    double inf_value = 0.0; // inf over the box of g'x
    for (int j = 0; j < lp.num_vars; ++j) {
        const double gj = g[static_cast<std::size_t>(j)];
        if (gj == 0.0) continue;
        const double lo = lower_of(lp, j);
        const double hi = upper_of(lp, j);
        const double cand = gj > 0.0 ? gj * lo : gj * hi;
        if (!finite(cand)) {
            // an infinite bound in the paying direction: tolerate only
            // negligible coefficients there
            if (std::abs(gj) <= 1e-12) continue;
            return -kInf;
        }
        inf_value += cand;
    }
    double bf = 0.0;
    for (int i = 0; i < lp.num_eq(); ++i) {
        bf += f_eq[static_cast<std::size_t>(i)] * lp.eq_rhs[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < lp.num_ineq(); ++i) {
        bf += f_ineq[static_cast<std::size_t>(i)] * lp.ineq_rhs[static_cast<std::size_t>(i)];
    }
    return inf_value - bf;
}

double ray_residual(const LinearProgram& lp, const LpSolution& sol) {
    const auto& r = sol.ray;
    if (static_cast<int>(r.size()) != lp.num_vars) return kInf;
    double viol = 0.0;
    std::vector<double> ar_eq(static_cast<std::size_t>(lp.num_eq()), 0.0);
    std::vector<double> ar_ineq(static_cast<std::size_t>(lp.num_ineq()), 0.0);
    for (const auto& t : lp.eq) {
        ar_eq[static_cast<std::size_t>(t.row)] += t.value * r[static_cast<std::size_t>(t.col)];
    }
    for (const auto& t : lp.ineq) {
        ar_ineq[static_cast<std::size_t>(t.row)] += t.value * r[static_cast<std::size_t>(t.col)];
    }
    for (double v : ar_eq) viol = std::max(viol, std::abs(v));
    for (double v : ar_ineq) viol = std::max(viol, v);
    double cr = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
        cr += lp.objective[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(j)];
        if (finite(lower_of(lp, j))) viol = std::max(viol, -r[static_cast<std::size_t>(j)]);
        if (finite(upper_of(lp, j))) viol = std::max(viol, r[static_cast<std::size_t>(j)]);
    }
    // the ray must strictly improve the objective
    viol = std::max(viol, cr + 1e-12);
    return viol;
}

void write_mps(const LinearProgram& lp, std::ostream& os, std::string_view name) {
    char buf[160];
    auto row_name = [&](bool eq_block, int i) {
        std::snprintf(buf, sizeof buf, "R%d", eq_block ? i + 1 : lp.num_eq() + i + 1);
        return std::string(buf);
    };
    os << "NAME          " << name << "\n";
    os << "ROWS\n N  COST\n";
    for (int i = 0; i < lp.num_eq(); ++i) os << " E  " << row_name(true, i) << "\n";
    for (int i = 0; i < lp.num_ineq(); ++i) os << " L  " << row_name(false, i) << "\n";

    // entries grouped per column, objective first
    std::vector<std::vector<std::pair<std::string, double>>> per_col(
        static_cast<std::size_t>(lp.num_vars));
    for (int j = 0; j < lp.num_vars; ++j) {
        per_col[static_cast<std::size_t>(j)].emplace_back("COST",
                                                          lp.objective[static_cast<std::size_t>(j)]);
    }
    std::vector<std::map<int, double>> eq_acc(static_cast<std::size_t>(lp.num_vars));
    std::vector<std::map<int, double>> ineq_acc(static_cast<std::size_t>(lp.num_vars));
    for (const auto& t : lp.eq) eq_acc[static_cast<std::size_t>(t.col)][t.row] += t.value;
    for (const auto& t : lp.ineq) ineq_acc[static_cast<std::size_t>(t.col)][t.row] += t.value;
    for (int j = 0; j < lp.num_vars; ++j) {
        for (const auto& [row, v] : eq_acc[static_cast<std::size_t>(j)]) {
            per_col[static_cast<std::size_t>(j)].emplace_back(row_name(true, row), v);
        }
        for (const auto& [row, v] : ineq_acc[static_cast<std::size_t>(j)]) {
            per_col[static_cast<std::size_t>(j)].emplace_back(row_name(false, row), v);
        }
    }
    os << "COLUMNS\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        std::snprintf(buf, sizeof buf, "X%d", j + 1);
        const std::string col = buf;
        const auto& entries = per_col[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < entries.size(); k += 2) {
            if (k + 1 < entries.size()) {
                std::snprintf(buf, sizeof buf, "    %-8s  %-8s  %-12.6G  %-8s  %-12.6G\n",
                              col.c_str(), entries[k].first.c_str(), entries[k].second,
                              entries[k + 1].first.c_str(), entries[k + 1].second);
            } else {
                std::snprintf(buf, sizeof buf, "    %-8s  %-8s  %-12.6G\n", col.c_str(),
                              entries[k].first.c_str(), entries[k].second);
            }
            os << buf;
        }
    }
    os << "RHS\n";
    for (int i = 0; i < lp.num_eq(); ++i) {
        std::snprintf(buf, sizeof buf, "    RHS       %-8s  %-12.6G\n", row_name(true, i).c_str(),
                      lp.eq_rhs[static_cast<std::size_t>(i)]);
        os << buf;
    }
    for (int i = 0; i < lp.num_ineq(); ++i) {
        std::snprintf(buf, sizeof buf, "    RHS       %-8s  %-12.6G\n", row_name(false, i).c_str(),
                      lp.ineq_rhs[static_cast<std::size_t>(i)]);
        os << buf;
    }
    os << "BOUNDS\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        const double lo = lower_of(lp, j);
        const double hi = upper_of(lp, j);
        std::snprintf(buf, sizeof buf, "X%d", j + 1);
        const std::string col = buf;
        if (lo == 0.0 && !finite(hi)) continue; // MPS default
        if (!finite(lo) && !finite(hi)) {
            std::snprintf(buf, sizeof buf, " FR BND       %-8s\n", col.c_str());
            os << buf;
            continue;
        }
        if (lo == hi) {
            std::snprintf(buf, sizeof buf, " FX BND       %-8s  %-12.6G\n", col.c_str(), lo);
            os << buf;
            continue;
        }
        if (!finite(lo)) {
            std::snprintf(buf, sizeof buf, " MI BND       %-8s\n", col.c_str());
            os << buf;
        } else if (lo != 0.0) {
            std::snprintf(buf, sizeof buf, " LO BND       %-8s  %-12.6G\n", col.c_str(), lo);
            os << buf;
        }
        if (finite(hi)) {
            std::snprintf(buf, sizeof buf, " UP BND       %-8s  %-12.6G\n", col.c_str(), hi);
            os << buf;
        }
    }
    os << "ENDATA\n";
}

} // namespace gridhedge::lp
