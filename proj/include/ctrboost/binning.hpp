#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ctrboost {

/// Bin index assigned to NaN; it never takes part in the ordered scan.
inline constexpr uint32_t kMissingBin = 0xFFFFFFFFu;

/// Quantile bins of one numeric feature. Bin k holds values in
/// (upper_bounds[k-1], upper_bounds[k]]; the last bin is unbounded above.
struct FeatureBins {
    std::vector<double> upper_bounds;

    uint32_t n_bins() const { return static_cast<uint32_t>(upper_bounds.size() + 1); }
    uint32_t bin(double value) const;

    bool operator==(const FeatureBins&) const = default;
};

/// At most `max_bins` bins from the non-NaN values. Features with no more
/// distinct values than bins get one bin per value.
FeatureBins build_bins(std::span<const double> values, uint32_t max_bins);

} // namespace ctrboost
