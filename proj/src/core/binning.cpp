#include "ctrboost/binning.hpp"

#include <algorithm>
#include <cmath>

#include "ctrboost/error.hpp"

namespace ctrboost {

uint32_t FeatureBins::bin(double value) const {
    if (std::isnan(value)) return kMissingBin;
    const auto it = std::lower_bound(upper_bounds.begin(), upper_bounds.end(), value);
    return static_cast<uint32_t>(it - upper_bounds.begin());
}

FeatureBins build_bins(std::span<const double> values, uint32_t max_bins) {
    require(max_bins >= 2, "max_bins must be >= 2");
    require(max_bins <= 65536, "max_bins must be <= 65536");

    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> distinct;
    std::vector<std::size_t> cumulative; // rows with value <= distinct[i]
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (distinct.empty() || sorted[i] != distinct.back()) {
            distinct.push_back(sorted[i]);
            cumulative.push_back(0);
        }
        cumulative.back() = i + 1;
    }

    FeatureBins bins;
    if (distinct.size() <= 1) return bins;

    auto midpoint = [&](std::size_t i) {
        const double mid = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
        // Rounding can land the midpoint on the upper value; keep it in the lower bin.
        return mid < distinct[i + 1] ? mid : distinct[i];
    };

    if (distinct.size() <= max_bins) {
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i) bins.upper_bounds.push_back(midpoint(i));
        return bins;
    }

    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    for (uint32_t k = 1; k < max_bins; ++k) {
        const double rank = n * static_cast<double>(k) / static_cast<double>(max_bins);
        while (i + 1 < distinct.size() && static_cast<double>(cumulative[i]) < rank) ++i;
        if (i + 1 >= distinct.size()) break;
        const double bound = midpoint(i);
        if (bins.upper_bounds.empty() || bound > bins.upper_bounds.back()) {
            bins.upper_bounds.push_back(bound);
        }
    }
    return bins;
}

} // namespace ctrboost
