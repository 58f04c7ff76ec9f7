#include "ctrboost/tree.hpp"

#include "ctrboost/error.hpp"

namespace ctrboost {

SplitCandidate find_best_split(const NodeHistogram& hist, const BinnedMatrix& matrix,
                               const SplitParams& params) {
    SplitCandidate best;
    for (std::size_t f = 0; f < hist.size(); ++f) {
        if (matrix.columns[f].n_bins < 2) continue;
        SplitCandidate cand = matrix.columns[f].type == FeatureType::numeric
                                  ? best_numeric_split(hist[f], params)
                                  : best_categorical_split(hist[f], params);
        if (cand.valid && (!best.valid || cand.gain > best.gain)) {
            cand.feature = static_cast<uint32_t>(f);
            best = std::move(cand);
        }
    }
    return best;
}

namespace {

struct PendingNode {
    int32_t id;
    std::vector<uint32_t> rows;
    NodeHistogram hist;
};

bool row_goes_left(const SplitCandidate& split, const BinnedMatrix& matrix, uint32_t row) {
    const uint32_t b = matrix.columns[split.feature].bins[row];
    if (split.kind == SplitKind::numeric) {
        return b == kMissingBin ? split.default_left : b <= split.bin;
    }
    return std::binary_search(split.left_categories.begin(), split.left_categories.end(), b);
}

} // namespace

GrownTree grow_tree(std::span<const uint32_t> rows, std::span<const double> g,
                    std::span<const double> h, const BinnedMatrix& matrix,
                    std::span<const FeatureBins> numeric_bins, const GrowthParams& params) {
    require(!rows.empty(), "grow_tree needs at least one row");
    require(params.max_depth >= 1, "max_depth must be >= 1");
    require(numeric_bins.size() == matrix.columns.size(), "one bin set per feature expected");

    GrownTree out;
    out.leaf_of_row.assign(matrix.n_rows, -1);
    auto& nodes = out.tree.nodes;
    nodes.emplace_back();

    auto make_leaf = [&](const PendingNode& p) {
        double gs = 0.0;
        double hs = 0.0;
        for (uint32_t r : p.rows) {
            gs += g[r];
            hs += h[r];
        }
        auto& node = nodes[static_cast<std::size_t>(p.id)];
        node.weight = leaf_weight(gs, hs, params.split.lambda);
        for (uint32_t r : p.rows) out.leaf_of_row[r] = p.id;
    };

    std::vector<PendingNode> level;
    level.push_back({0, std::vector<uint32_t>(rows.begin(), rows.end()),
                     build_histograms(rows, matrix, g, h, params.n_threads)});

    for (uint32_t depth = 0; depth < params.max_depth && !level.empty(); ++depth) {
        std::vector<PendingNode> next;
        for (auto& p : level) {
            SplitCandidate split = find_best_split(p.hist, matrix, params.split);
            if (!split.valid) {
                make_leaf(p);
                continue;
            }
            std::vector<uint32_t> left_rows;
            std::vector<uint32_t> right_rows;
            for (uint32_t r : p.rows) {
                (row_goes_left(split, matrix, r) ? left_rows : right_rows).push_back(r);
            }

            const auto left_id = static_cast<int32_t>(nodes.size());
            const auto right_id = left_id + 1;
            {
                TreeNode& node = nodes[static_cast<std::size_t>(p.id)];
                node.left = left_id;
                node.right = right_id;
                node.feature = split.feature;
                node.kind = split.kind;
                node.default_left = split.default_left;
                node.gain = split.gain;
                if (split.kind == SplitKind::numeric) {
                    node.threshold = numeric_bins[split.feature].upper_bounds.at(split.bin);
                } else {
                    node.left_categories = std::move(split.left_categories);
                    node.right_categories = std::move(split.right_categories);
                }
            }
            TreeNode child;
            child.depth = depth + 1;
            nodes.push_back(child);
            nodes.push_back(child);

            if (depth + 1 == params.max_depth) {
                // Children become leaves; their histograms are never scanned.
                next.push_back({left_id, std::move(left_rows), {}});
                next.push_back({right_id, std::move(right_rows), {}});
                continue;
            }
            const bool left_smaller = left_rows.size() <= right_rows.size();
            NodeHistogram small = build_histograms(left_smaller ? left_rows : right_rows, matrix,
                                                   g, h, params.n_threads);
            NodeHistogram large = subtract_histograms(p.hist, small);
            p.hist.clear();
            next.push_back({left_id, std::move(left_rows),
                            left_smaller ? std::move(small) : std::move(large)});
            next.push_back({right_id, std::move(right_rows),
                            left_smaller ? std::move(large) : std::move(small)});
        }
        level = std::move(next);
    }
    for (const auto& p : level) make_leaf(p);
    return out;
}

} // namespace ctrboost
