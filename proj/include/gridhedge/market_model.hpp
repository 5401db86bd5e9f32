#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridhedge/errors.hpp"

namespace gridhedge {

/// Default cap on the number of paths any exhaustive operation will touch.
inline constexpr std::uint64_t kDefaultMaxPaths = 10'000'000;

/// A discrete market: T trading dates after time 0, a finite set of price
/// levels, and the spot price s0. The path space is the set of all G^T
/// level sequences (x_1, ..., x_T); x_0 := s0 is a model constant, not a
/// path coordinate.
///
/// Paths are indexed lexicographically by date (first coordinate most
/// significant), and that order is stable: path id p has coordinate
/// levels[(p / G^(T-1-t)) % G] at date t+1.
class PathGridModel {
  public:
    /// Validates: horizon >= 1, levels strictly increasing and >= 0,
    /// min(levels) <= s0 <= max(levels). The s0 bracket is necessary for a
    /// martingale measure to exist at all, so constructors reject it early.
    PathGridModel(int horizon, std::vector<double> levels, double s0);

    int horizon() const { return horizon_; }
    const std::vector<double>& levels() const { return levels_; }
    double s0() const { return s0_; }
    int grid_size() const { return static_cast<int>(levels_.size()); }

    /// Exact G^T, or nullopt when it overflows 64 bits.
    std::optional<std::uint64_t> path_count() const;

    /// G^T, throwing SizeLimitError when it exceeds `cap`.
    std::uint64_t path_count_checked(std::uint64_t cap = kDefaultMaxPaths) const;

    /// Index of an exact level value, or -1 if `value` is off the grid.
    int level_index(double value) const;

  private:
    int horizon_;
    std::vector<double> levels_;
    double s0_;
};

/// One path: the coordinates x_1, ..., x_T, each a member of the level set.
struct Path {
    std::vector<double> coordinates;
};

/// Fast id arithmetic for the lexicographic path order. All exhaustive loops
/// in the engine run over path ids and level indices, never materialized
/// Path objects.
class PathIndexer {
  public:
    PathIndexer(int grid_size, int horizon);

    std::uint64_t path_count() const { return pow_[horizon_]; }
    /// Number of length-t prefixes, G^t. t may be 0 (the empty prefix).
    std::uint64_t prefix_count(int t) const { return pow_[t]; }
    /// Total number of prefixes of lengths 0..T-1 (martingale row count).
    std::uint64_t total_prefixes() const;
    /// Row offset of the length-t prefix block when prefixes are stacked by
    /// increasing length.
    std::uint64_t prefix_offset(int t) const;

    /// Level index of coordinate x_{t+1} (0-based t in [0, T)).
    int coordinate(std::uint64_t path_id, int t) const {
        return static_cast<int>((path_id / pow_[horizon_ - 1 - t]) % grid_);
    }
    /// Id of the length-t prefix of a path (lexicographic within length t).
    std::uint64_t prefix_id(std::uint64_t path_id, int t) const {
        return path_id / pow_[horizon_ - t];
    }
    /// Last level index of a nonempty prefix.
    int prefix_last(std::uint64_t prefix_id_t) const {
        return static_cast<int>(prefix_id_t % static_cast<std::uint64_t>(grid_));
    }
    void decode(std::uint64_t path_id, std::span<int> out) const;

  private:
    int grid_;
    int horizon_;
    std::vector<std::uint64_t> pow_; // pow_[t] = G^t, overflow-checked
};

enum class PayoffKind {
    EuropeanCall, ///< (x_d - K)_+
    EuropeanPut,  ///< (K - x_d)_+
    Power,        ///< x_d^p, p > 1
    Entropy,      ///< x_d log x_d, continuously extended to 0 at x = 0
    RunningMax,   ///< max(s0, x_1, ..., x_T)
    Spread,       ///< |x_d1 - x_d2|
    Custom,       ///< table of values in path-id order
};

/// A payoff function on paths. Evaluation is total and finite on every grid
/// path; that is checked by validate() rather than assumed.
struct Payoff {
    PayoffKind kind = PayoffKind::EuropeanCall;
    double strike = 0.0;
    double exponent = 0.0;
    int date = 0;  // 1..T where applicable
    int date2 = 0; // second date of a Spread
    std::vector<double> table;

    static Payoff european_call(double strike, int date);
    static Payoff european_put(double strike, int date);
    static Payoff power_option(double exponent, int date);
    static Payoff entropy_option(int date);
    static Payoff running_max();
    static Payoff spread(int date1, int date2);
    static Payoff custom(std::vector<double> values);

    /// Throws InvalidInstance if the payoff's parameters do not fit `model`
    /// (date out of range, exponent <= 1, wrong custom table size, ...).
    void validate(const PathGridModel& model) const;

    std::string describe() const;
};

/// x log x with the continuous extension value 0 at x = 0.
double xlogx(double x);

enum class Side {
    BuyOnly,  ///< can only be bought; constrains E[payoff - price] <= 0
    TwoSided, ///< bid = ask; constrains E[payoff - price] = 0
};

/// A quoted option. The normalized constraint function is
/// phi(x) = payoff(x) - price, so a quote of 0 means phi = payoff.
struct Instrument {
    Payoff payoff;
    double price = 0.0;
    Side side = Side::BuyOnly;
};

/// The finite family of quoted instruments defining the market. The optional
/// growth witness marks a designated super-linear instrument (a power or
/// entropy option at the horizon); on a finite grid it carries no extra
/// constraint and is kept as metadata only.
struct InstrumentSet {
    std::vector<Instrument> instruments;
    std::optional<int> growth_witness;

    void validate(const PathGridModel& model) const;
    int size() const { return static_cast<int>(instruments.size()); }
};

/// Evaluates `payoff` at a path given by level indices. `path_id` is only
/// consulted for Custom payoffs.
double evaluate_on_indices(const Payoff& payoff, const PathGridModel& model,
                           std::span<const int> level_indices, std::uint64_t path_id);

/// Evaluates `payoff` on an explicit path. Throws InvalidPath when a
/// coordinate is off-grid or the length is wrong. Pure.
double evaluate(const Payoff& payoff, const Path& path, const PathGridModel& model);

/// Maps a coordinate path to level indices, validating membership.
std::vector<int> path_to_indices(const Path& path, const PathGridModel& model);

/// All G^T paths in the documented lexicographic order.
/// Throws SizeLimitError when G^T > max_paths.
std::vector<Path> enumerate_paths(const PathGridModel& model,
                                  std::uint64_t max_paths = kDefaultMaxPaths);

} // namespace gridhedge
