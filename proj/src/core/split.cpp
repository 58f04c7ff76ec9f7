#include "ctrboost/split.hpp"

#include <algorithm>
#include <numeric>

namespace ctrboost {

namespace {

// Scans the ordered sequence `stats` (each entry one bin or category) and
// returns the best prefix length in [1, n-1], or 0 if no cut has positive gain.
struct ScanResult {
    std::size_t prefix = 0;
    double gain = 0.0;
    bool default_left = true;
    BinStats left, right;
};

ScanResult scan_prefixes(const std::vector<BinStats>& stats, const BinStats& missing,
                         const SplitParams& params) {
    const std::size_t n = stats.size();
    ScanResult best;
    if (n < 2) return best;

    std::vector<BinStats> suffix(n + 1);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + stats[i];

    BinStats left;
    for (std::size_t cut = 1; cut < n; ++cut) {
        left += stats[cut - 1];
        const BinStats& right = suffix[cut];
        if (left.count == 0 || right.count == 0) continue;
        const bool default_left = left.h >= right.h;
        const BinStats l = default_left ? left + missing : left;
        const BinStats r = default_left ? right : right + missing;
        if (l.h < params.min_child_weight || r.h < params.min_child_weight) continue;
        const double gain = split_gain(l, r, params);
        if (gain > best.gain) {
            best = {cut, gain, default_left, l, r};
        }
    }
    return best;
}

} // namespace

SplitCandidate best_numeric_split(const FeatureHistogram& hist, const SplitParams& params) {
    SplitCandidate out;
    out.kind = SplitKind::numeric;
    const auto scan = scan_prefixes(hist.bins, hist.missing, params);
    if (scan.prefix == 0) return out;
    out.valid = true;
    out.gain = scan.gain;
    out.bin = static_cast<uint32_t>(scan.prefix - 1);
    out.default_left = scan.default_left;
    out.left = scan.left;
    out.right = scan.right;
    return out;
}

SplitCandidate best_categorical_split(const FeatureHistogram& hist, const SplitParams& params) {
    SplitCandidate out;
    out.kind = SplitKind::categorical;

    std::vector<uint32_t> present;
    for (uint32_t c = 0; c < hist.bins.size(); ++c) {
        if (hist.bins[c].count > 0) present.push_back(c);
    }
    if (present.size() < 2) return out;

    auto ratio = [&](uint32_t c) {
        return hist.bins[c].g / (hist.bins[c].h + kCategoricalHessianSmoothing);
    };
    std::stable_sort(present.begin(), present.end(),
                     [&](uint32_t a, uint32_t b) { return ratio(a) < ratio(b); });

    std::vector<BinStats> ordered;
    ordered.reserve(present.size());
    for (uint32_t c : present) ordered.push_back(hist.bins[c]);

    const auto scan = scan_prefixes(ordered, hist.missing, params);
    if (scan.prefix == 0) return out;
    out.valid = true;
    out.gain = scan.gain;
    out.default_left = scan.default_left;
    out.left = scan.left;
    out.right = scan.right;
    const auto cut = present.begin() + static_cast<std::ptrdiff_t>(scan.prefix);
    out.left_categories.assign(present.begin(), cut);
    out.right_categories.assign(cut, present.end());
    std::sort(out.left_categories.begin(), out.left_categories.end());
    std::sort(out.right_categories.begin(), out.right_categories.end());
    return out;
}

} // namespace ctrboost
