#include "ctrboost/histogram.hpp"

#include "ctrboost/error.hpp"

namespace ctrboost {

NodeHistogram build_histograms(std::span<const uint32_t> rows, const BinnedMatrix& matrix,
                               std::span<const double> g, std::span<const double> h,
                               uint32_t n_threads) {
    require(g.size() == matrix.n_rows && h.size() == matrix.n_rows,
            "gradient arrays must cover every row");
    NodeHistogram hist(matrix.columns.size());
    parallel_for(matrix.columns.size(), n_threads, [&](std::size_t f) {
        const auto& col = matrix.columns[f];
        auto& out = hist[f];
        out.bins.assign(col.n_bins, BinStats{});
        for (uint32_t r : rows) {
            const uint32_t b = col.bins[r];
            BinStats& slot = b == kMissingBin ? out.missing : out.bins[b];
            slot.g += g[r];
            slot.h += h[r];
            ++slot.count;
        }
    });
    return hist;
}

NodeHistogram subtract_histograms(const NodeHistogram& parent, const NodeHistogram& child) {
    NodeHistogram out = parent;
    for (std::size_t f = 0; f < out.size(); ++f) {
        for (std::size_t b = 0; b < out[f].bins.size(); ++b) out[f].bins[b] -= child[f].bins[b];
        out[f].missing -= child[f].missing;
    }
    return out;
}

} // namespace ctrboost
