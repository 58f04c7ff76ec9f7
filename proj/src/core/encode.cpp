#include "ctrboost/encode.hpp"

#include <algorithm>
#include <numeric>

#include "ctrboost/error.hpp"
#include "ctrboost/rng.hpp"

namespace ctrboost {

std::string_view to_string(EncoderMode mode) {
    switch (mode) {
    case EncoderMode::label: return "label";
    case EncoderMode::target: return "target";
    case EncoderMode::kfold_target: return "kfold_target";
    case EncoderMode::ordered_ts: return "ordered_ts";
    case EncoderMode::native_passthrough: return "native";
    }
    return "unknown";
}

EncoderMode parse_encoder_mode(std::string_view text) {
    if (text == "label" || text == "le") return EncoderMode::label;
    if (text == "target" || text == "te") return EncoderMode::target;
    if (text == "kfold_target" || text == "kfold") return EncoderMode::kfold_target;
    if (text == "ordered_ts" || text == "ordered") return EncoderMode::ordered_ts;
    if (text == "native" || text == "native_passthrough" || text == "none") {
        return EncoderMode::native_passthrough;
    }
    fail(ErrorCode::parse, "unknown encoder mode '" + std::string(text) + "'");
}

void EncoderSpec::validate() const {
    require(smoothing >= 0.0, "encoder smoothing must be >= 0");
    require(k_folds >= 2, "k_folds must be >= 2");
    require(n_permutations >= 1, "n_permutations must be >= 1");
    if (prior) require(*prior >= 0.0 && *prior <= 1.0, "encoder prior must lie in [0, 1]");
}

FittedEncoder::FittedEncoder(EncoderSpec spec, double prior, std::vector<EncodedColumn> columns)
    : spec_(spec), prior_(prior), columns_(std::move(columns)) {}

double FittedEncoder::value(std::size_t column, uint32_t code) const {
    const auto& col = columns_.at(column);
    if (spec_.mode == EncoderMode::label) {
        return code == kUnseenCode || code >= col.stats.size()
                   ? static_cast<double>(col.stats.size())
                   : static_cast<double>(code);
    }
    if (code == kUnseenCode || code >= col.stats.size()) return prior_;
    const auto& s = col.stats[code];
    return smoothed_mean(s.target_sum, static_cast<double>(s.count), spec_.smoothing, prior_);
}

namespace {

double target_mean(const Dataset& ds) {
    const auto y = ds.target();
    return static_cast<double>(std::accumulate(y.begin(), y.end(), uint64_t{0})) /
           static_cast<double>(y.size());
}

void require_fittable(const Dataset& ds) {
    require(ds.has_target(), "encoder fitting requires a target column");
    require(ds.n_rows() > 0, "encoder fitting requires at least one row");
}

std::vector<std::size_t> categorical_indices(const Dataset& ds) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        if (ds.feature(j).is_categorical()) out.push_back(j);
    }
    return out;
}

std::vector<EncodedColumn> full_statistics(const Dataset& ds) {
    const auto y = ds.target();
    std::vector<EncodedColumn> columns;
    for (std::size_t j : categorical_indices(ds)) {
        const auto& col = ds.feature(j);
        EncodedColumn enc{col.meta.name, col.dictionary,
                          std::vector<CategoryStats>(col.dictionary->size())};
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            auto& s = enc.stats[col.codes[r]];
            s.target_sum += y[r];
            ++s.count;
        }
        columns.push_back(std::move(enc));
    }
    return columns;
}

double default_prior(const Dataset& ds, const EncoderSpec& spec) {
    if (spec.prior) return *spec.prior;
    if (spec.mode == EncoderMode::ordered_ts) return kDefaultOrderedPrior;
    return target_mean(ds);
}

} // namespace

FittedEncoder fit_label_encoding(const Dataset& ds) {
    require(ds.n_rows() > 0, "label encoding requires at least one row");
    EncoderSpec spec;
    spec.mode = EncoderMode::label;
    std::vector<EncodedColumn> columns;
    for (std::size_t j : categorical_indices(ds)) {
        const auto& col = ds.feature(j);
        EncodedColumn enc{col.meta.name, col.dictionary,
                          std::vector<CategoryStats>(col.dictionary->size())};
        columns.push_back(std::move(enc));
    }
    return FittedEncoder(spec, 0.0, std::move(columns));
}

FittedEncoder fit_target_encoding(const Dataset& ds, const EncoderSpec& spec) {
    spec.validate();
    require(spec.mode == EncoderMode::target || spec.mode == EncoderMode::kfold_target ||
                spec.mode == EncoderMode::ordered_ts,
            "fit_target_encoding requires a target-statistics encoder mode");
    require_fittable(ds);
    return FittedEncoder(spec, default_prior(ds, spec), full_statistics(ds));
}

std::vector<uint32_t> assign_folds(std::size_t n_rows, uint32_t k_folds, uint64_t seed) {
    require(k_folds >= 2, "k_folds must be >= 2");
    require(n_rows >= k_folds, "K-fold encoding needs at least k_folds rows");
    Rng rng(seed);
    const auto perm = rng.permutation(n_rows);
    std::vector<uint32_t> fold(n_rows);
    for (std::size_t t = 0; t < n_rows; ++t) fold[perm[t]] = static_cast<uint32_t>(t % k_folds);
    return fold;
}

TrainingEncoding fit_apply_kfold_target_encoding(const Dataset& ds, const EncoderSpec& spec) {
    spec.validate();
    return fit_apply_kfold_target_encoding(ds, spec, assign_folds(ds.n_rows(), spec.k_folds, spec.seed));
}

TrainingEncoding fit_apply_kfold_target_encoding(const Dataset& ds, const EncoderSpec& spec,
                                                 std::span<const uint32_t> fold_of_row) {
    spec.validate();
    require(spec.mode == EncoderMode::kfold_target, "encoder mode must be kfold_target");
    require_fittable(ds);
    require(fold_of_row.size() == ds.n_rows(), "fold assignment length must equal row count");
    const uint32_t k = spec.k_folds;
    require(ds.n_rows() >= k, "K-fold encoding needs at least k_folds rows");

    const auto y = ds.target();
    std::vector<double> fold_sum(k, 0.0);
    std::vector<uint64_t> fold_count(k, 0);
    double total_sum = 0.0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const uint32_t f = fold_of_row[r];
        require(f < k, "fold index out of range");
        fold_sum[f] += y[r];
        ++fold_count[f];
        total_sum += y[r];
    }
    for (uint32_t f = 0; f < k; ++f) {
        if (fold_count[f] == 0) {
            fail(ErrorCode::invalid_argument, "fold " + std::to_string(f) + " has no rows");
        }
    }

    // Training rows use the out-of-fold target mean unless a prior is fixed,
    // so a row's own label never reaches its encoding.
    std::vector<double> fold_prior(k);
    for (uint32_t f = 0; f < k; ++f) {
        fold_prior[f] = spec.prior ? *spec.prior
                                   : (total_sum - fold_sum[f]) /
                                         static_cast<double>(ds.n_rows() - fold_count[f]);
    }

    TrainingEncoding out;
    auto columns = full_statistics(ds);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = ds.feature(*ds.find_feature(columns[c].name));
        const std::size_t card = columns[c].stats.size();
        std::vector<double> sum(static_cast<std::size_t>(k) * card, 0.0);
        std::vector<uint64_t> count(static_cast<std::size_t>(k) * card, 0);
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            const std::size_t slot = fold_of_row[r] * card + col.codes[r];
            sum[slot] += y[r];
            ++count[slot];
        }
        std::vector<double> values(ds.n_rows());
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            const uint32_t code = col.codes[r];
            const std::size_t slot = fold_of_row[r] * card + code;
            const auto& full = columns[c].stats[code];
            const double oof_sum = full.target_sum - sum[slot];
            const auto oof_count = static_cast<double>(full.count - count[slot]);
            values[r] = smoothed_mean(oof_sum, oof_count, spec.smoothing, fold_prior[fold_of_row[r]]);
        }
        out.values.push_back(std::move(values));
    }
    const double prior = spec.prior ? *spec.prior : total_sum / static_cast<double>(ds.n_rows());
    out.encoder = FittedEncoder(spec, prior, std::move(columns));
    return out;
}

TrainingEncoding fit_apply_ordered_ts(const Dataset& ds, const EncoderSpec& spec) {
    spec.validate();
    require(ds.n_rows() > 0, "ordered TS requires at least one row");
    Rng rng(spec.seed);
    std::vector<std::vector<std::size_t>> perms;
    perms.reserve(spec.n_permutations);
    for (uint32_t p = 0; p < spec.n_permutations; ++p) perms.push_back(rng.permutation(ds.n_rows()));
    return fit_apply_ordered_ts(ds, spec, perms);
}

TrainingEncoding fit_apply_ordered_ts(const Dataset& ds, const EncoderSpec& spec,
                                      std::span<const std::vector<std::size_t>> permutations) {
    spec.validate();
    require(spec.mode == EncoderMode::ordered_ts, "encoder mode must be ordered_ts");
    require_fittable(ds);
    require(!permutations.empty(), "ordered TS needs at least one permutation");
    const double prior = default_prior(ds, spec);
    const auto y = ds.target();
    const std::size_t n = ds.n_rows();

    TrainingEncoding out;
    auto columns = full_statistics(ds);
    for (const auto& enc_col : columns) {
        const auto& col = ds.feature(*ds.find_feature(enc_col.name));
        const std::size_t card = enc_col.stats.size();
        std::vector<double> values(n, 0.0);
        std::vector<double> sum(card);
        std::vector<uint64_t> count(card);
        for (const auto& perm : permutations) {
            require(perm.size() == n, "permutation length must equal row count");
            std::fill(sum.begin(), sum.end(), 0.0);
            std::fill(count.begin(), count.end(), 0);
            for (std::size_t row : perm) {
                const uint32_t code = col.codes.at(row);
                values[row] += smoothed_mean(sum[code], static_cast<double>(count[code]),
                                             spec.smoothing, prior);
                sum[code] += y[row];
                ++count[code];
            }
        }
        if (permutations.size() > 1) {
            const auto p = static_cast<double>(permutations.size());
            for (double& v : values) v /= p;
        }
        out.values.push_back(std::move(values));
    }
    out.encoder = FittedEncoder(spec, prior, std::move(columns));
    return out;
}

namespace {

template <class ColumnValues>
Dataset rebuild(const Dataset& ds, const FittedEncoder& enc, ColumnValues&& encoded_values) {
    std::vector<bool> used(enc.columns().size(), false);
    std::vector<FeatureColumn> features;
    features.reserve(ds.n_features());
    for (const auto& col : ds.features()) {
        std::optional<std::size_t> slot;
        for (std::size_t c = 0; c < enc.columns().size(); ++c) {
            if (enc.columns()[c].name == col.meta.name) slot = c;
        }
        if (!col.is_categorical()) {
            if (slot) used[*slot] = true;
            features.push_back(col);
            continue;
        }
        if (!slot) {
            fail(ErrorCode::schema,
                 "categorical column '" + col.meta.name + "' unknown to the fitted encoder");
        }
        used[*slot] = true;
        features.push_back(FeatureColumn::numerical(col.meta.name, encoded_values(*slot, col)));
    }
    for (std::size_t c = 0; c < used.size(); ++c) {
        if (!used[c]) {
            fail(ErrorCode::schema, "column '" + enc.columns()[c].name + "' missing from dataset");
        }
    }
    return ds.with_features(std::move(features));
}

} // namespace

Dataset apply(const FittedEncoder& enc, const Dataset& ds) {
    if (enc.spec().mode == EncoderMode::native_passthrough) return ds;
    return rebuild(ds, enc, [&](std::size_t slot, const FeatureColumn& col) {
        const auto codes = remap_codes(col, *enc.columns()[slot].dictionary);
        std::vector<double> values;
        values.reserve(codes.size());
        for (uint32_t code : codes) values.push_back(enc.value(slot, code));
        return values;
    });
}

Dataset replace_categoricals(const Dataset& ds, const FittedEncoder& enc,
                             std::span<const std::vector<double>> values) {
    require(values.size() == enc.columns().size(), "one value vector per encoded column expected");
    return rebuild(ds, enc, [&](std::size_t slot, const FeatureColumn& col) {
        require(values[slot].size() == col.size(), "encoded column length mismatch");
        return values[slot];
    });
}

std::pair<FittedEncoder, Dataset> fit_transform(const Dataset& ds, const EncoderSpec& spec) {
    spec.validate();
    switch (spec.mode) {
    case EncoderMode::native_passthrough:
        return {FittedEncoder(spec, 0.0, {}), ds};
    case EncoderMode::label: {
        auto enc = fit_label_encoding(ds);
        auto encoded = apply(enc, ds);
        return {std::move(enc), std::move(encoded)};
    }
    case EncoderMode::target: {
        auto enc = fit_target_encoding(ds, spec);
        auto encoded = apply(enc, ds);
        return {std::move(enc), std::move(encoded)};
    }
    case EncoderMode::kfold_target: {
        auto te = fit_apply_kfold_target_encoding(ds, spec);
        auto encoded = replace_categoricals(ds, te.encoder, te.values);
        return {std::move(te.encoder), std::move(encoded)};
    }
    case EncoderMode::ordered_ts: {
        auto te = fit_apply_ordered_ts(ds, spec);
        auto encoded = replace_categoricals(ds, te.encoder, te.values);
        return {std::move(te.encoder), std::move(encoded)};
    }
    }
    fail(ErrorCode::internal, "unhandled encoder mode");
}

} // namespace ctrboost
