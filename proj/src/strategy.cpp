#include "gridhedge/strategy.hpp"

#include <cmath>

namespace gridhedge {

DynamicStrategy::DynamicStrategy(int grid_size, int horizon)
    : grid_(grid_size), horizon_(horizon) {
    PathIndexer ix(grid_size, horizon);
    positions_.resize(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        positions_[static_cast<std::size_t>(t)].assign(ix.prefix_count(t), 0.0);
    }
}

double DynamicStrategy::gain(const PathGridModel& model, std::span<const int> idx) const {
    double acc = 0.0;
    double prev = model.s0();
    std::uint64_t prefix = 0;
    for (int t = 0; t < horizon_; ++t) {
        const double next = model.levels()[static_cast<std::size_t>(idx[t])];
        acc += positions_[static_cast<std::size_t>(t)][prefix] * (next - prev);
        prev = next;
        prefix = prefix * static_cast<std::uint64_t>(grid_) + static_cast<std::uint64_t>(idx[t]);
    }
    return acc;
}

double DynamicStrategy::gain(const PathGridModel& model, const Path& path) const {
    const auto idx = path_to_indices(path, model);
    return gain(model, std::span<const int>(idx.data(), idx.size()));
}

double DynamicStrategy::max_abs() const {
    double m = 0.0;
    for (const auto& level : positions_) {
        for (double v : level) m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace gridhedge
