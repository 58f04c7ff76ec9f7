#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctrboost {

enum class ColumnKind : uint8_t { categorical, numerical, target };

std::string_view to_string(ColumnKind kind);

struct ColumnMeta {
    std::string name;
    ColumnKind kind = ColumnKind::numerical;
    std::size_t cardinality = 0; // categorical only
};

/// Raw category strings indexed by code.
using Dictionary = std::vector<std::string>;

/// Raw value recorded for an empty categorical cell.
inline constexpr std::string_view kMissingCategory = "__missing__";

/// Code produced by remap_codes() for a category absent from the reference
/// dictionary.
inline constexpr uint32_t kUnseenCode = 0xFFFFFFFFu;

struct FeatureColumn {
    ColumnMeta meta;
    std::vector<uint32_t> codes;                   // categorical
    std::shared_ptr<const Dictionary> dictionary;  // categorical
    std::vector<double> values;                    // numerical

    bool is_categorical() const { return meta.kind == ColumnKind::categorical; }
    std::size_t size() const { return is_categorical() ? codes.size() : values.size(); }
    const std::string& category(std::size_t row) const { return (*dictionary)[codes[row]]; }

    static FeatureColumn categorical(std::string name, std::vector<uint32_t> codes,
                                     std::shared_ptr<const Dictionary> dictionary);
    static FeatureColumn numerical(std::string name, std::vector<double> values);
};

/// Immutable columnar table: feature columns in file order plus an optional
/// binary target. Datasets loaded for training always carry a target; only
/// scoring inputs may omit it.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<FeatureColumn> features, std::optional<std::string> target_name,
            std::vector<uint8_t> target);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_features() const { return features_.size(); }
    const FeatureColumn& feature(std::size_t index) const { return features_.at(index); }
    const std::vector<FeatureColumn>& features() const { return features_; }
    std::optional<std::size_t> find_feature(std::string_view name) const;

    bool has_target() const { return target_name_.has_value(); }
    const std::string& target_name() const;
    std::span<const uint8_t> target() const { return target_; }

    /// Features followed by the target column (when present).
    std::vector<ColumnMeta> schema() const;

    /// Rows in the given order; dictionaries are shared with the parent.
    Dataset take(std::span<const std::size_t> rows) const;

    /// Same rows and target with a different feature set.
    Dataset with_features(std::vector<FeatureColumn> features) const;

    /// Rows of `this` followed by rows of `other`; schemas and dictionaries
    /// must match.
    Dataset concat(const Dataset& other) const;

private:
    std::vector<FeatureColumn> features_;
    std::optional<std::string> target_name_;
    std::vector<uint8_t> target_;
    std::size_t n_rows_ = 0;
};

enum class HintKind : uint8_t { categorical, numerical, target, ignore };

/// Column name -> kind mapping read from a `name = kind` text file.
/// Columns not listed are inferred: numerical when every non-empty cell
/// parses as a number, categorical otherwise.
struct SchemaHint {
    std::map<std::string, HintKind> kinds;

    static SchemaHint read(const std::filesystem::path& path);
    static SchemaHint parse(std::istream& in);
};

struct CsvOptions {
    char delimiter = ',';
    /// Overrides or supplies the target declared in the hint.
    std::optional<std::string> target;
    bool require_target = true;
};

Dataset load_csv(const std::filesystem::path& path, const SchemaHint& hint = {},
                 const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const SchemaHint& hint = {}, const CsvOptions& options = {});

/// One RFC-4180 record per call; returns false at end of input.
bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields);

std::optional<uint8_t> parse_target_value(std::string_view text);

struct SplitSpec {
    double train_frac = 0.8;
    double valid_frac = 0.1;
    double test_frac = 0.1;
    uint64_t seed = 0;

    void validate() const;
};

struct SplitIndices {
    std::vector<std::size_t> train, valid, test;
};

struct DatasetSplit {
    Dataset train, valid, test;
};

/// Seeded row partition. valid and test get floor(frac * n) rows, train gets
/// the rest; indices within each part are ascending.
SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec);
DatasetSplit split(const Dataset& ds, const SplitSpec& spec);

/// Uniform sample without replacement of floor(fraction * n) rows, kept in
/// ascending row order.
Dataset subsample(const Dataset& ds, double fraction, uint64_t seed);

/// Codes of `column` expressed in `reference`'s code space, matched by raw
/// string. Categories missing from `reference` become kUnseenCode.
std::vector<uint32_t> remap_codes(const FeatureColumn& column, const Dictionary& reference);

} // namespace ctrboost
