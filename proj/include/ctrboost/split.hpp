#pragma once

#include <cstdint>
#include <vector>

#include "ctrboost/histogram.hpp"

namespace ctrboost {

struct SplitParams {
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
};

/// Hessian smoothing in the G / (H + eps) ordering of categories.
inline constexpr double kCategoricalHessianSmoothing = 1.0;

enum class SplitKind : uint8_t { numeric, categorical };

struct SplitCandidate {
    bool valid = false;
    double gain = 0.0;
    uint32_t feature = 0;
    SplitKind kind = SplitKind::numeric;
    uint32_t bin = 0;                       // numeric: bins <= bin go left
    std::vector<uint32_t> left_categories;  // categorical, ascending codes
    std::vector<uint32_t> right_categories; // categorical, ascending codes
    bool default_left = true;               // missing / unseen values
    BinStats left;                          // including the default side's missing rows
    BinStats right;
};

/// Second-order gain of splitting `left + right` into the two children.
inline double split_gain(const BinStats& left, const BinStats& right, const SplitParams& p) {
    auto score = [&](double g, double h) { return g * g / (h + p.lambda); };
    return 0.5 * (score(left.g, left.h) + score(right.g, right.h) -
                  score(left.g + right.g, left.h + right.h)) -
           p.gamma;
}

inline double leaf_weight(double g, double h, double lambda) {
    const double denom = h + lambda;
    return denom > 0.0 ? -g / denom : 0.0;
}

/// Best left-prefix cut over the ordered bins. Missing rows join the side
/// with the larger hessian mass. Equal gains keep the lowest bin.
SplitCandidate best_numeric_split(const FeatureHistogram& hist, const SplitParams& params);

/// Categories present at the node are sorted by G / (H + eps) and scanned
/// as ordered bins; the left set is the best prefix. Equal gains keep the
/// shortest prefix.
SplitCandidate best_categorical_split(const FeatureHistogram& hist, const SplitParams& params);

} // namespace ctrboost
