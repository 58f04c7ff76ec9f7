#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctrboost/binning.hpp"
#include "ctrboost/histogram.hpp"
#include "ctrboost/split.hpp"

namespace ctrboost {

/// One feature column as seen by a tree: raw values for numeric features,
/// model-space codes (kUnseenCode allowed) for categorical ones.
struct FeatureView {
    FeatureType type = FeatureType::numeric;
    std::span<const double> values;
    std::span<const uint32_t> codes;
};

struct TreeNode {
    int32_t left = -1; // -1 marks a leaf
    int32_t right = -1;
    uint32_t feature = 0;
    SplitKind kind = SplitKind::numeric;
    double threshold = 0.0; // numeric: value <= threshold goes left
    std::vector<uint32_t> left_categories;
    std::vector<uint32_t> right_categories;
    bool default_left = true;
    double gain = 0.0;
    double weight = 0.0; // leaf output before learning-rate scaling
    uint32_t depth = 0;

    bool is_leaf() const { return left < 0; }
};

class Tree {
public:
    std::vector<TreeNode> nodes; // root first

    const TreeNode& leaf_for(std::span<const FeatureView> features, std::size_t row) const {
        std::size_t id = 0;
        while (!nodes[id].is_leaf()) {
            id = static_cast<std::size_t>(goes_left(nodes[id], features, row) ? nodes[id].left
                                                                               : nodes[id].right);
        }
        return nodes[id];
    }

    uint32_t depth() const {
        uint32_t d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }

    std::size_t n_leaves() const {
        return static_cast<std::size_t>(
            std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    static bool goes_left(const TreeNode& node, std::span<const FeatureView> features,
                          std::size_t row) {
        const auto& f = features[node.feature];
        if (node.kind == SplitKind::numeric) {
            const double v = f.values[row];
            if (std::isnan(v)) return node.default_left;
            return v <= node.threshold;
        }
        const uint32_t code = f.codes[row];
        if (std::binary_search(node.left_categories.begin(), node.left_categories.end(), code)) {
            return true;
        }
        if (std::binary_search(node.right_categories.begin(), node.right_categories.end(), code)) {
            return false;
        }
        return node.default_left;
    }
};

struct GrowthParams {
    uint32_t max_depth = 6;
    SplitParams split;
    uint32_t n_threads = 1;
};

struct GrownTree {
    Tree tree;
    /// Leaf node id per matrix row; -1 for rows outside the training set.
    std::vector<int32_t> leaf_of_row;
};

/// Best split over all features of one node histogram. Equal gains keep the
/// lowest feature index.
SplitCandidate find_best_split(const NodeHistogram& hist, const BinnedMatrix& matrix,
                               const SplitParams& params);

/// Depth-wise growth to params.max_depth. `numeric_bins[f]` supplies the
/// threshold values of numeric feature f (ignored for categorical ones).
GrownTree grow_tree(std::span<const uint32_t> rows, std::span<const double> g,
                    std::span<const double> h, const BinnedMatrix& matrix,
                    std::span<const FeatureBins> numeric_bins, const GrowthParams& params);

} // namespace ctrboost
