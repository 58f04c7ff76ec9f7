#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctrboost/data.hpp"

namespace ctrboost {

enum class EncoderMode : uint8_t { label, target, kfold_target, ordered_ts, native_passthrough };

std::string_view to_string(EncoderMode mode);
EncoderMode parse_encoder_mode(std::string_view text);

struct EncoderSpec {
    EncoderMode mode = EncoderMode::native_passthrough;
    double smoothing = 1.0;
    uint32_t k_folds = 5;
    uint32_t n_permutations = 1;
    uint64_t seed = 0;
    /// Fixed prior. When unset: target/label use the fitting-data mean,
    /// K-fold training rows use the out-of-fold mean, ordered TS uses
    /// kDefaultOrderedPrior.
    std::optional<double> prior;

    void validate() const;
};

inline constexpr double kDefaultOrderedPrior = 0.5;

struct CategoryStats {
    double target_sum = 0.0;
    uint64_t count = 0;
};

struct EncodedColumn {
    std::string name;
    std::shared_ptr<const Dictionary> dictionary;
    std::vector<CategoryStats> stats; // indexed by dictionary code
};

/// Full-data category statistics for every categorical column, used to
/// encode validation, test and scoring rows.
class FittedEncoder {
public:
    FittedEncoder() = default;
    FittedEncoder(EncoderSpec spec, double prior, std::vector<EncodedColumn> columns);

    const EncoderSpec& spec() const { return spec_; }
    double prior() const { return prior_; }
    const std::vector<EncodedColumn>& columns() const { return columns_; }

    /// Encoded value of `code` in column `column`; kUnseenCode gives the
    /// mode's fallback (cardinality for label mode, the prior otherwise).
    double value(std::size_t column, uint32_t code) const;

private:
    EncoderSpec spec_;
    double prior_ = 0.0;
    std::vector<EncodedColumn> columns_;
};

/// (sum + a * prior) / (count + a); the prior when both count and a are 0.
inline double smoothed_mean(double sum, double count, double smoothing, double prior) {
    const double denom = count + smoothing;
    return denom > 0.0 ? (sum + smoothing * prior) / denom : prior;
}

/// Encoded training columns (one vector per categorical column, in
/// encoder column order) plus the encoder for everything else.
struct TrainingEncoding {
    FittedEncoder encoder;
    std::vector<std::vector<double>> values;
};

FittedEncoder fit_label_encoding(const Dataset& ds);
FittedEncoder fit_target_encoding(const Dataset& ds, const EncoderSpec& spec);

std::vector<uint32_t> assign_folds(std::size_t n_rows, uint32_t k_folds, uint64_t seed);

TrainingEncoding fit_apply_kfold_target_encoding(const Dataset& ds, const EncoderSpec& spec);
TrainingEncoding fit_apply_kfold_target_encoding(const Dataset& ds, const EncoderSpec& spec,
                                                 std::span<const uint32_t> fold_of_row);

TrainingEncoding fit_apply_ordered_ts(const Dataset& ds, const EncoderSpec& spec);
/// `permutations[p][t]` is the row visited at step t of permutation p.
TrainingEncoding fit_apply_ordered_ts(const Dataset& ds, const EncoderSpec& spec,
                                      std::span<const std::vector<std::size_t>> permutations);

/// Replaces categorical columns with their encoded numeric values. Columns
/// the encoder knows that are already numerical pass through unchanged.
Dataset apply(const FittedEncoder& enc, const Dataset& ds);

/// Builds the encoded training dataset from per-row training values.
Dataset replace_categoricals(const Dataset& ds, const FittedEncoder& enc,
                             std::span<const std::vector<double>> values);

/// Dispatches on spec.mode and returns the encoder together with the
/// encoded training data. native_passthrough returns the input unchanged.
std::pair<FittedEncoder, Dataset> fit_transform(const Dataset& ds, const EncoderSpec& spec);

} // namespace ctrboost
