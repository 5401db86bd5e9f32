#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridhedge/market_model.hpp"

namespace gridhedge {

/// A self-financing dynamic position in the underlying: one real position per
/// path prefix of each length 0..T-1, in lexicographic prefix order. The
/// empty prefix (t = 0) carries the initial position.
///
/// Its gain on a path is sum_t position(t, prefix) * (x_{t+1} - x_t) with
/// x_0 = s0.
class DynamicStrategy {
  public:
    DynamicStrategy() = default;
    DynamicStrategy(int grid_size, int horizon);

    int grid_size() const { return grid_; }
    int horizon() const { return horizon_; }
    bool empty() const { return positions_.empty(); }

    double position(int t, std::uint64_t prefix) const {
        return positions_[static_cast<std::size_t>(t)][prefix];
    }
    void set_position(int t, std::uint64_t prefix, double value) {
        positions_[static_cast<std::size_t>(t)][prefix] = value;
    }
    const std::vector<std::vector<double>>& positions() const { return positions_; }

    /// Gain along a path given by level indices.
    double gain(const PathGridModel& model, std::span<const int> level_indices) const;

    /// Gain along an explicit coordinate path (validates the coordinates).
    double gain(const PathGridModel& model, const Path& path) const;

    /// Largest absolute position, used for scaling checks.
    double max_abs() const;

  private:
    int grid_ = 0;
    int horizon_ = 0;
    std::vector<std::vector<double>> positions_; // positions_[t] has G^t entries
};

} // namespace gridhedge
