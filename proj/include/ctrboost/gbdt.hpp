#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctrboost/binning.hpp"
#include "ctrboost/data.hpp"
#include "ctrboost/encode.hpp"
#include "ctrboost/tree.hpp"

namespace ctrboost {

enum class CategoricalMode : uint8_t { native, encoded };

std::string_view to_string(CategoricalMode mode);

struct GBDTConfig {
    uint32_t n_trees = 500;
    double learning_rate = 0.1;
    uint32_t max_depth = 6;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    uint32_t max_bins = 256;
    uint32_t early_stopping_rounds = 50; // 0 disables
    CategoricalMode cat_mode = CategoricalMode::native;
    uint64_t seed = 0;
    uint32_t n_threads = 1;

    void validate() const;
};

/// Raw scores are clipped to this magnitude before the sigmoid.
inline constexpr double kRawScoreClip = 40.0;

double sigmoid(double raw);

struct GradHess {
    std::vector<double> g;
    std::vector<double> h;
};

/// Binary logloss derivatives w.r.t. the raw score: g = p - y, h = p(1 - p).
GradHess compute_grad_hess(std::span<const uint8_t> y, std::span<const double> raw);

struct ModelFeature {
    std::string name;
    FeatureType type = FeatureType::numeric;
    FeatureBins bins;                              // numeric
    std::shared_ptr<const Dictionary> dictionary;  // categorical
};

struct TrainingMetadata {
    GBDTConfig config;
    /// Entry i is the metric after i trees, i = 0..iterations_run.
    std::vector<double> train_logloss;
    std::vector<double> valid_logloss;
    uint32_t iterations_run = 0;
    uint32_t best_iteration = 0; // trees kept
    std::vector<std::string> warnings;
};

struct Model {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<Tree> trees;
    std::vector<ModelFeature> features;
    std::optional<FittedEncoder> encoder; // present when trained in encoded mode
    TrainingMetadata metadata;

    /// sigmoid(base_score + learning_rate * sum of leaf weights).
    std::vector<double> predict(const Dataset& ds) const;

    /// Raw scores using the first `n_trees` trees (all by default).
    std::vector<double> predict_raw(const Dataset& ds,
                                    std::optional<std::size_t> n_trees = std::nullopt) const;

    /// Feature views of `ds` in model feature order, after encoding and
    /// dictionary remapping. `storage` keeps remapped data alive.
    std::vector<FeatureView> bind(const Dataset& ds, Dataset& storage,
                                  std::vector<std::vector<uint32_t>>& codes) const;
};

/// Called with the number of trees so far (starting at 0) and the current
/// raw validation scores (empty without validation data).
using IterationCallback = std::function<void(uint32_t n_trees, std::span<const double> valid_raw)>;

/// Boosts `config.n_trees` trees on binary logloss. With cat_mode = encoded
/// the encoder described by `encoder` is fitted on `train` and embedded in
/// the model. With early stopping the model is truncated to the iteration
/// with the lowest validation logloss.
Model train(const Dataset& train, const Dataset* valid, const GBDTConfig& config,
            const EncoderSpec& encoder = {}, const IterationCallback& on_iteration = {});

} // namespace ctrboost
