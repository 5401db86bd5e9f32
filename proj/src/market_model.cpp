#include "gridhedge/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace gridhedge {

namespace {

bool is_finite(double v) { return std::isfinite(v); }

[[noreturn]] void fail_instance(const std::string& msg) { throw InvalidInstance(msg); }

} // namespace

PathGridModel::PathGridModel(int horizon, std::vector<double> levels, double s0)
    : horizon_(horizon), levels_(std::move(levels)), s0_(s0) {
    if (horizon_ < 1) fail_instance("horizon must be >= 1");
    if (levels_.empty()) fail_instance("level set must be nonempty");
    for (double v : levels_) {
        if (!is_finite(v) || v < 0.0) fail_instance("levels must be finite and nonnegative");
    }
    if (std::adjacent_find(levels_.begin(), levels_.end(), std::greater_equal<>()) !=
        levels_.end()) {
        fail_instance("levels must be strictly increasing");
    }
    if (!is_finite(s0_)) fail_instance("s0 must be finite");
    if (s0_ < levels_.front() || s0_ > levels_.back()) {
        fail_instance("s0 must lie within [min(levels), max(levels)]; "
                      "otherwise no martingale measure exists");
    }
}

std::optional<std::uint64_t> PathGridModel::path_count() const {
    std::uint64_t n = 1;
    const auto g = static_cast<std::uint64_t>(grid_size());
    for (int t = 0; t < horizon_; ++t) {
        if (n > std::numeric_limits<std::uint64_t>::max() / g) return std::nullopt;
        n *= g;
    }
    return n;
}

std::uint64_t PathGridModel::path_count_checked(std::uint64_t cap) const {
    auto n = path_count();
    if (!n || *n > cap) {
        std::ostringstream os;
        os << "path count " << grid_size() << "^" << horizon_ << " exceeds cap " << cap;
        throw SizeLimitError(os.str());
    }
    return *n;
}

int PathGridModel::level_index(double value) const {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), value);
    if (it != levels_.end() && *it == value) {
        return static_cast<int>(it - levels_.begin());
    }
    return -1;
}

PathIndexer::PathIndexer(int grid_size, int horizon) : grid_(grid_size), horizon_(horizon) {
    pow_.resize(static_cast<std::size_t>(horizon_) + 1);
    pow_[0] = 1;
    for (int t = 1; t <= horizon_; ++t) {
        const auto g = static_cast<std::uint64_t>(grid_);
        if (pow_[t - 1] > std::numeric_limits<std::uint64_t>::max() / g) {
            throw SizeLimitError("path count overflows 64 bits");
        }
        pow_[t] = pow_[t - 1] * g;
    }
}

std::uint64_t PathIndexer::total_prefixes() const {
    std::uint64_t n = 0;
    for (int t = 0; t < horizon_; ++t) n += pow_[t];
    return n;
}

std::uint64_t PathIndexer::prefix_offset(int t) const {
    std::uint64_t n = 0;
    for (int s = 0; s < t; ++s) n += pow_[s];
    return n;
}

void PathIndexer::decode(std::uint64_t path_id, std::span<int> out) const {
    for (int t = 0; t < horizon_; ++t) out[t] = coordinate(path_id, t);
}

Payoff Payoff::european_call(double strike, int date) {
    Payoff p;
    p.kind = PayoffKind::EuropeanCall;
    p.strike = strike;
    p.date = date;
    return p;
}

Payoff Payoff::european_put(double strike, int date) {
    Payoff p;
    p.kind = PayoffKind::EuropeanPut;
    p.strike = strike;
    p.date = date;
    return p;
}

Payoff Payoff::power_option(double exponent, int date) {
    Payoff p;
    p.kind = PayoffKind::Power;
    p.exponent = exponent;
    p.date = date;
    return p;
}

Payoff Payoff::entropy_option(int date) {
    Payoff p;
    p.kind = PayoffKind::Entropy;
    p.date = date;
    return p;
}

Payoff Payoff::running_max() {
    Payoff p;
    p.kind = PayoffKind::RunningMax;
    return p;
}

Payoff Payoff::spread(int date1, int date2) {
    Payoff p;
    p.kind = PayoffKind::Spread;
    p.date = date1;
    p.date2 = date2;
    return p;
}

Payoff Payoff::custom(std::vector<double> values) {
    Payoff p;
    p.kind = PayoffKind::Custom;
    p.table = std::move(values);
    return p;
}

void Payoff::validate(const PathGridModel& model) const {
    const int T = model.horizon();
    auto check_date = [&](int d, const char* what) {
        if (d < 1 || d > T) {
            std::ostringstream os;
            os << what << " date " << d << " out of range 1.." << T;
            fail_instance(os.str());
        }
    };
    switch (kind) {
        case PayoffKind::EuropeanCall:
        case PayoffKind::EuropeanPut:
            if (!is_finite(strike) || strike < 0.0) fail_instance("strike must be finite and >= 0");
            check_date(date, "option");
            break;
        case PayoffKind::Power:
            if (!is_finite(exponent) || exponent <= 1.0) fail_instance("power exponent must be > 1");
            check_date(date, "power option");
            break;
        case PayoffKind::Entropy:
            check_date(date, "entropy option");
            break;
        case PayoffKind::RunningMax:
            break;
        case PayoffKind::Spread:
            check_date(date, "spread first");
            check_date(date2, "spread second");
            break;
        case PayoffKind::Custom: {
            const auto n = model.path_count();
            if (!n || table.size() != *n) {
                fail_instance("custom payoff table must have exactly G^T entries");
            }
            for (double v : table) {
                if (!is_finite(v)) fail_instance("custom payoff table must be finite");
            }
            break;
        }
    }
}

std::string Payoff::describe() const {
    std::ostringstream os;
    switch (kind) {
        case PayoffKind::EuropeanCall: os << "call(K=" << strike << ", t=" << date << ")"; break;
        case PayoffKind::EuropeanPut: os << "put(K=" << strike << ", t=" << date << ")"; break;
        case PayoffKind::Power: os << "power(p=" << exponent << ", t=" << date << ")"; break;
        case PayoffKind::Entropy: os << "entropy(t=" << date << ")"; break;
        case PayoffKind::RunningMax: os << "running_max"; break;
        case PayoffKind::Spread: os << "spread(t=" << date << ", s=" << date2 << ")"; break;
        case PayoffKind::Custom: os << "custom[" << table.size() << "]"; break;
    }
    return os.str();
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void InstrumentSet::validate(const PathGridModel& model) const {
    for (const auto& inst : instruments) {
        inst.payoff.validate(model);
        if (!is_finite(inst.price)) fail_instance("instrument price must be finite");
    }
    if (growth_witness) {
        const int i = *growth_witness;
        if (i < 0 || i >= size()) fail_instance("growth witness index out of range");
        const Payoff& p = instruments[static_cast<std::size_t>(i)].payoff;
        const bool super_linear =
            p.kind == PayoffKind::Power || p.kind == PayoffKind::Entropy;
        if (!super_linear || p.date != model.horizon()) {
            fail_instance("growth witness must be a power or entropy option at the horizon");
        }
    }
}

double evaluate_on_indices(const Payoff& payoff, const PathGridModel& model,
                           std::span<const int> idx, std::uint64_t path_id) {
    const auto& lv = model.levels();
    switch (payoff.kind) {
        case PayoffKind::EuropeanCall:
            return std::max(lv[static_cast<std::size_t>(idx[payoff.date - 1])] - payoff.strike, 0.0);
        case PayoffKind::EuropeanPut:
            return std::max(payoff.strike - lv[static_cast<std::size_t>(idx[payoff.date - 1])], 0.0);
        case PayoffKind::Power:
            return std::pow(lv[static_cast<std::size_t>(idx[payoff.date - 1])], payoff.exponent);
        case PayoffKind::Entropy:
            return xlogx(lv[static_cast<std::size_t>(idx[payoff.date - 1])]);
        case PayoffKind::RunningMax: {
            double m = model.s0();
            for (int t = 0; t < model.horizon(); ++t) {
                m = std::max(m, lv[static_cast<std::size_t>(idx[t])]);
            }
            return m;
        }
        case PayoffKind::Spread:
            return std::abs(lv[static_cast<std::size_t>(idx[payoff.date - 1])] -
                            lv[static_cast<std::size_t>(idx[payoff.date2 - 1])]);
        case PayoffKind::Custom:
            return payoff.table[path_id];
    }
    return 0.0; // unreachable
}

std::vector<int> path_to_indices(const Path& path, const PathGridModel& model) {
    if (static_cast<int>(path.coordinates.size()) != model.horizon()) {
        throw InvalidPath("path length does not match the horizon");
    }
    std::vector<int> idx(path.coordinates.size());
    for (std::size_t t = 0; t < path.coordinates.size(); ++t) {
        const int i = model.level_index(path.coordinates[t]);
        if (i < 0) {
            std::ostringstream os;
            os << "coordinate " << path.coordinates[t] << " at date " << (t + 1)
               << " is not a grid level";
            throw InvalidPath(os.str());
        }
        idx[t] = i;
    }
    return idx;
}

double evaluate(const Payoff& payoff, const Path& path, const PathGridModel& model) {
    payoff.validate(model);
    const auto idx = path_to_indices(path, model);
    // Reconstruct the lexicographic id; only Custom payoffs actually use it.
    PathIndexer ix(model.grid_size(), model.horizon());
    std::uint64_t id = 0;
    for (int t = 0; t < model.horizon(); ++t) {
        id = id * static_cast<std::uint64_t>(model.grid_size()) +
             static_cast<std::uint64_t>(idx[static_cast<std::size_t>(t)]);
    }
    return evaluate_on_indices(payoff, model, idx, id);
}

std::vector<Path> enumerate_paths(const PathGridModel& model, std::uint64_t max_paths) {
    const std::uint64_t n = model.path_count_checked(max_paths);
    PathIndexer ix(model.grid_size(), model.horizon());
    std::vector<Path> out;
    out.reserve(n);
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    for (std::uint64_t p = 0; p < n; ++p) {
        ix.decode(p, idx);
        Path path;
        path.coordinates.resize(idx.size());
        for (std::size_t t = 0; t < idx.size(); ++t) {
            path.coordinates[t] = model.levels()[static_cast<std::size_t>(idx[t])];
        }
        out.push_back(std::move(path));
    }
    return out;
}

} // namespace gridhedge
