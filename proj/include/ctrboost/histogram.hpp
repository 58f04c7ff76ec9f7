#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctrboost/binning.hpp"

namespace ctrboost {

struct BinStats {
    double g = 0.0;
    double h = 0.0;
    uint64_t count = 0;

    BinStats& operator+=(const BinStats& o) {
        g += o.g;
        h += o.h;
        count += o.count;
        return *this;
    }
    BinStats& operator-=(const BinStats& o) {
        g -= o.g;
        h -= o.h;
        count -= o.count;
        return *this;
    }
};

inline BinStats operator+(BinStats a, const BinStats& b) { return a += b; }
inline BinStats operator-(BinStats a, const BinStats& b) { return a -= b; }

enum class FeatureType : uint8_t { numeric, categorical };

/// Column-major bin indices for training. Numeric features hold bin ids
/// (kMissingBin for NaN); categorical features hold dictionary codes.
struct BinnedMatrix {
    struct Column {
        FeatureType type = FeatureType::numeric;
        uint32_t n_bins = 0;
        std::vector<uint32_t> bins;
    };
    std::vector<Column> columns;
    std::size_t n_rows = 0;
};

struct FeatureHistogram {
    std::vector<BinStats> bins;
    BinStats missing;
};

using NodeHistogram = std::vector<FeatureHistogram>;

/// Per-feature (G, H, count) per bin over `rows`. Features are processed
/// independently, on up to `n_threads` threads; each accumulator sums rows
/// in the given order, so the result does not depend on the thread count.
NodeHistogram build_histograms(std::span<const uint32_t> rows, const BinnedMatrix& matrix,
                               std::span<const double> g, std::span<const double> h,
                               uint32_t n_threads = 1);

/// parent - child, bin by bin: the sibling's histogram.
NodeHistogram subtract_histograms(const NodeHistogram& parent, const NodeHistogram& child);

/// Runs fn(i) for i in [0, n) on up to n_threads threads.
template <class Fn>
void parallel_for(std::size_t n, uint32_t n_threads, Fn&& fn);

} // namespace ctrboost

#include <algorithm>
#include <thread>

template <class Fn>
void ctrboost::parallel_for(std::size_t n, uint32_t n_threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max<uint32_t>(n_threads, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
}
