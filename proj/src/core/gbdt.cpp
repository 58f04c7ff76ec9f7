#include "ctrboost/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "ctrboost/error.hpp"
#include "ctrboost/metrics.hpp"

namespace ctrboost {

std::string_view to_string(CategoricalMode mode) {
    return mode == CategoricalMode::native ? "native" : "encoded";
}

void GBDTConfig::validate() const {
    require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate must be >= 0");
    require(max_depth >= 1, "max_depth must be >= 1");
    require(lambda >= 0.0, "lambda must be >= 0");
    require(gamma >= 0.0, "gamma must be >= 0");
    require(min_child_weight >= 0.0, "min_child_weight must be >= 0");
    require(max_bins >= 2 && max_bins <= 65536, "max_bins must lie in [2, 65536]");
    require(n_threads >= 1, "n_threads must be >= 1");
}

double sigmoid(double raw) {
    const double x = std::clamp(raw, -kRawScoreClip, kRawScoreClip);
    return 1.0 / (1.0 + std::exp(-x));
}

GradHess compute_grad_hess(std::span<const uint8_t> y, std::span<const double> raw) {
    require(y.size() == raw.size(), "compute_grad_hess: length mismatch");
    GradHess out;
    out.g.resize(y.size());
    out.h.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = sigmoid(raw[i]);
        out.g[i] = p - static_cast<double>(y[i]);
        out.h[i] = p * (1.0 - p);
    }
    return out;
}

std::vector<FeatureView> Model::bind(const Dataset& ds, Dataset& storage,
                                     std::vector<std::vector<uint32_t>>& codes) const {
    const Dataset* input = &ds;
    if (encoder) {
        storage = apply(*encoder, ds);
        input = &storage;
    }
    codes.assign(features.size(), {});
    std::vector<FeatureView> views(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& mf = features[f];
        const auto idx = input->find_feature(mf.name);
        if (!idx) fail(ErrorCode::schema, "input lacks model feature '" + mf.name + "'");
        const auto& col = input->feature(*idx);
        views[f].type = mf.type;
        if (mf.type == FeatureType::numeric) {
            if (col.is_categorical()) {
                fail(ErrorCode::schema, "feature '" + mf.name + "' must be numerical");
            }
            views[f].values = col.values;
        } else {
            if (!col.is_categorical()) {
                fail(ErrorCode::schema, "feature '" + mf.name + "' must be categorical");
            }
            codes[f] = remap_codes(col, *mf.dictionary);
            views[f].codes = codes[f];
        }
    }
    return views;
}

std::vector<double> Model::predict_raw(const Dataset& ds, std::optional<std::size_t> n_trees) const {
    Dataset storage;
    std::vector<std::vector<uint32_t>> codes;
    const auto views = bind(ds, storage, codes);
    const std::size_t used = std::min(n_trees.value_or(trees.size()), trees.size());
    std::vector<double> raw(ds.n_rows(), base_score);
    for (std::size_t t = 0; t < used; ++t) {
        for (std::size_t r = 0; r < raw.size(); ++r) {
            raw[r] += learning_rate * trees[t].leaf_for(views, r).weight;
        }
    }
    return raw;
}

std::vector<double> Model::predict(const Dataset& ds) const {
    auto out = predict_raw(ds);
    for (double& v : out) v = sigmoid(v);
    return out;
}

namespace {

double probability_logloss(std::span<const uint8_t> y, std::span<const double> raw) {
    std::vector<double> p(raw.size());
    std::transform(raw.begin(), raw.end(), p.begin(), sigmoid);
    return logloss(y, p);
}

} // namespace

Model train(const Dataset& train_ds, const Dataset* valid_ds, const GBDTConfig& config,
            const EncoderSpec& encoder_spec, const IterationCallback& on_iteration) {
    config.validate();
    require(train_ds.has_target(), "training data needs a target column");
    require(train_ds.n_rows() > 0, "training data is empty");
    if (valid_ds) {
        require(valid_ds->has_target(), "validation data needs a target column");
        require(valid_ds->n_rows() > 0, "validation data is empty");
    }
    require(config.early_stopping_rounds == 0 || valid_ds != nullptr,
            "early stopping requires validation data");

    Model model;
    model.learning_rate = config.learning_rate;
    model.metadata.config = config;

    // Encoding.
    const Dataset* train_input = &train_ds;
    Dataset encoded_train;
    if (config.cat_mode == CategoricalMode::encoded) {
        require(encoder_spec.mode != EncoderMode::native_passthrough,
                "cat_mode=encoded needs an encoder mode other than native");
        auto [enc, encoded] = fit_transform(train_ds, encoder_spec);
        model.encoder = std::move(enc);
        encoded_train = std::move(encoded);
        train_input = &encoded_train;
    } else {
        require(encoder_spec.mode == EncoderMode::native_passthrough,
                "cat_mode=native cannot be combined with encoder '" +
                    std::string(to_string(encoder_spec.mode)) + "'");
    }
    const Dataset& tr = *train_input;
    const std::size_t n = tr.n_rows();
    const auto y = tr.target();

    // Features and bins.
    BinnedMatrix matrix;
    matrix.n_rows = n;
    std::vector<FeatureBins> numeric_bins(tr.n_features());
    for (std::size_t f = 0; f < tr.n_features(); ++f) {
        const auto& col = tr.feature(f);
        ModelFeature mf;
        mf.name = col.meta.name;
        BinnedMatrix::Column mc;
        if (col.is_categorical()) {
            mf.type = FeatureType::categorical;
            mf.dictionary = col.dictionary;
            mc.type = FeatureType::categorical;
            mc.n_bins = static_cast<uint32_t>(col.dictionary->size());
            mc.bins = col.codes;
        } else {
            mf.type = FeatureType::numeric;
            mf.bins = build_bins(col.values, config.max_bins);
            mc.type = FeatureType::numeric;
            mc.n_bins = mf.bins.n_bins();
            mc.bins.resize(n);
            for (std::size_t r = 0; r < n; ++r) mc.bins[r] = mf.bins.bin(col.values[r]);
            numeric_bins[f] = mf.bins;
        }
        model.features.push_back(std::move(mf));
        matrix.columns.push_back(std::move(mc));
    }

    // Base score.
    const double positives = std::accumulate(y.begin(), y.end(), 0.0);
    const double prior = positives / static_cast<double>(n);
    if (positives == 0.0 || positives == static_cast<double>(n)) {
        const std::string msg = "training targets contain a single class; base score clipped";
        model.metadata.warnings.push_back(msg);
        std::clog << "ctrboost: warning: " << msg << '\n';
    }
    const double clipped = std::clamp(prior, kDefaultLoglossEps, 1.0 - kDefaultLoglossEps);
    model.base_score = std::log(clipped / (1.0 - clipped));

    // Validation views.
    Dataset valid_storage;
    std::vector<std::vector<uint32_t>> valid_codes;
    std::vector<FeatureView> valid_views;
    std::vector<double> valid_raw;
    std::span<const uint8_t> valid_y;
    if (valid_ds) {
        valid_views = model.bind(*valid_ds, valid_storage, valid_codes);
        valid_raw.assign(valid_ds->n_rows(), model.base_score);
        valid_y = valid_ds->target();
    }

    std::vector<double> train_raw(n, model.base_score);
    std::vector<uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);

    GrowthParams growth;
    growth.max_depth = config.max_depth;
    growth.split = {config.lambda, config.gamma, config.min_child_weight};
    growth.n_threads = config.n_threads;

    auto& meta = model.metadata;
    meta.train_logloss.push_back(probability_logloss(y, train_raw));
    if (valid_ds) meta.valid_logloss.push_back(probability_logloss(valid_y, valid_raw));
    if (on_iteration) on_iteration(0, valid_raw);

    double best_valid = valid_ds ? meta.valid_logloss.front() : 0.0;
    uint32_t best_trees = 0;
    for (uint32_t t = 0; t < config.n_trees; ++t) {
        const auto gh = compute_grad_hess(y, train_raw);
        GrownTree grown = grow_tree(rows, gh.g, gh.h, matrix, numeric_bins, growth);
        for (std::size_t r = 0; r < n; ++r) {
            train_raw[r] +=
                model.learning_rate *
                grown.tree.nodes[static_cast<std::size_t>(grown.leaf_of_row[r])].weight;
        }
        for (std::size_t r = 0; r < valid_raw.size(); ++r) {
            valid_raw[r] += model.learning_rate * grown.tree.leaf_for(valid_views, r).weight;
        }
        model.trees.push_back(std::move(grown.tree));
        meta.iterations_run = t + 1;
        meta.train_logloss.push_back(probability_logloss(y, train_raw));
        if (valid_ds) {
            const double loss = probability_logloss(valid_y, valid_raw);
            meta.valid_logloss.push_back(loss);
            if (loss < best_valid) {
                best_valid = loss;
                best_trees = t + 1;
            }
        }
        if (on_iteration) on_iteration(t + 1, valid_raw);
        if (config.early_stopping_rounds > 0 && t + 1 - best_trees >= config.early_stopping_rounds) {
            break;
        }
    }

    if (config.early_stopping_rounds > 0) {
        model.trees.resize(best_trees);
        meta.best_iteration = best_trees;
    } else {
        meta.best_iteration = meta.iterations_run;
    }
    return model;
}

} // namespace ctrboost
