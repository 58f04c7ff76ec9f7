#include "ctrboost/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "ctrboost/config.hpp"
#include "ctrboost/error.hpp"
#include "ctrboost/rng.hpp"

namespace ctrboost {

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::numerical: return "numerical";
    case ColumnKind::target: return "target";
    }
    return "unknown";
}

FeatureColumn FeatureColumn::categorical(std::string name, std::vector<uint32_t> codes,
                                         std::shared_ptr<const Dictionary> dictionary) {
    FeatureColumn col;
    col.meta = {std::move(name), ColumnKind::categorical, dictionary ? dictionary->size() : 0};
    col.codes = std::move(codes);
    col.dictionary = std::move(dictionary);
    return col;
}

FeatureColumn FeatureColumn::numerical(std::string name, std::vector<double> values) {
    FeatureColumn col;
    col.meta = {std::move(name), ColumnKind::numerical, 0};
    col.values = std::move(values);
    return col;
}

Dataset::Dataset(std::vector<FeatureColumn> features, std::optional<std::string> target_name,
                 std::vector<uint8_t> target)
    : features_(std::move(features)), target_name_(std::move(target_name)),
      target_(std::move(target)) {
    if (target_name_) {
        n_rows_ = target_.size();
    } else {
        if (!target_.empty()) fail(ErrorCode::schema, "target values given without a target column");
        n_rows_ = features_.empty() ? 0 : features_.front().size();
    }
    std::unordered_set<std::string> names;
    if (target_name_) names.insert(*target_name_);
    for (const auto& col : features_) {
        if (col.meta.kind == ColumnKind::target) {
            fail(ErrorCode::schema, "feature column '" + col.meta.name + "' has kind target");
        }
        if (!names.insert(col.meta.name).second) {
            fail(ErrorCode::schema, "duplicate column name '" + col.meta.name + "'");
        }
        if (col.size() != n_rows_) {
            fail(ErrorCode::schema, "column '" + col.meta.name + "' has " +
                                        std::to_string(col.size()) + " rows, expected " +
                                        std::to_string(n_rows_));
        }
        if (col.is_categorical()) {
            if (!col.dictionary) fail(ErrorCode::schema, "column '" + col.meta.name + "' has no dictionary");
            const std::size_t card = col.dictionary->size();
            for (uint32_t code : col.codes) {
                if (code >= card) {
                    fail(ErrorCode::schema, "column '" + col.meta.name + "': code " +
                                                std::to_string(code) + " outside dictionary of size " +
                                                std::to_string(card));
                }
            }
        }
    }
    for (uint8_t y : target_) {
        if (y > 1) fail(ErrorCode::schema, "target values must be 0 or 1");
    }
}

std::optional<std::size_t> Dataset::find_feature(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].meta.name == name) return i;
    }
    return std::nullopt;
}

const std::string& Dataset::target_name() const {
    if (!target_name_) fail(ErrorCode::schema, "dataset has no target column");
    return *target_name_;
}

std::vector<ColumnMeta> Dataset::schema() const {
    std::vector<ColumnMeta> out;
    out.reserve(features_.size() + 1);
    for (const auto& col : features_) out.push_back(col.meta);
    if (target_name_) out.push_back({*target_name_, ColumnKind::target, 0});
    return out;
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
    std::vector<FeatureColumn> cols;
    cols.reserve(features_.size());
    for (const auto& src : features_) {
        FeatureColumn dst;
        dst.meta = src.meta;
        dst.dictionary = src.dictionary;
        if (src.is_categorical()) {
            dst.codes.reserve(rows.size());
            for (std::size_t r : rows) dst.codes.push_back(src.codes.at(r));
        } else {
            dst.values.reserve(rows.size());
            for (std::size_t r : rows) dst.values.push_back(src.values.at(r));
        }
        cols.push_back(std::move(dst));
    }
    std::vector<uint8_t> target;
    if (target_name_) {
        target.reserve(rows.size());
        for (std::size_t r : rows) target.push_back(target_.at(r));
    }
    Dataset out(std::move(cols), target_name_, std::move(target));
    if (!target_name_ && features_.empty()) out.n_rows_ = rows.size();
    return out;
}

Dataset Dataset::with_features(std::vector<FeatureColumn> features) const {
    Dataset out(std::move(features), target_name_, target_);
    if (out.n_rows_ != n_rows_ && !(out.features_.empty() && !target_name_)) {
        fail(ErrorCode::schema, "replacement features have a different row count");
    }
    out.n_rows_ = n_rows_;
    return out;
}

Dataset Dataset::concat(const Dataset& other) const {
    if (other.features_.size() != features_.size() || other.target_name_ != target_name_) {
        fail(ErrorCode::schema, "cannot concatenate datasets with different schemas");
    }
    std::vector<FeatureColumn> cols = features_;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& b = other.features_[j];
        auto& a = cols[j];
        if (a.meta.name != b.meta.name || a.meta.kind != b.meta.kind ||
            a.dictionary != b.dictionary) {
            fail(ErrorCode::schema, "cannot concatenate: column '" + a.meta.name + "' differs");
        }
        a.codes.insert(a.codes.end(), b.codes.begin(), b.codes.end());
        a.values.insert(a.values.end(), b.values.begin(), b.values.end());
    }
    std::vector<uint8_t> target = target_;
    target.insert(target.end(), other.target_.begin(), other.target_.end());
    return Dataset(std::move(cols), target_name_, std::move(target));
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

HintKind parse_hint_kind(const std::string& text, const std::string& column) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "categorical" || t == "cat") return HintKind::categorical;
    if (t == "numerical" || t == "num" || t == "numeric") return HintKind::numerical;
    if (t == "target" || t == "label") return HintKind::target;
    if (t == "ignore" || t == "skip") return HintKind::ignore;
    fail(ErrorCode::parse, "schema hint for '" + column + "': unknown kind '" + text + "'");
}

std::optional<double> parse_numeric_cell(std::string_view raw) {
    const std::string t = trim(raw);
    if (t.empty()) return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

} // namespace

SchemaHint SchemaHint::parse(std::istream& in) {
    SchemaHint hint;
    const auto file = KeyValueFile::parse(in, "<schema hint>");
    for (const auto& [name, kind] : file.entries()) {
        hint.kinds[name] = parse_hint_kind(kind, name);
    }
    return hint;
}

SchemaHint SchemaHint::read(const std::filesystem::path& path) {
    SchemaHint hint;
    const auto file = KeyValueFile::read(path);
    for (const auto& [name, kind] : file.entries()) {
        hint.kinds[name] = parse_hint_kind(kind, name);
    }
    return hint;
}

bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    bool quoted_field = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !quoted_field) {
            in_quotes = true;
            quoted_field = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in.peek() == '\n') in.get();
            if (fields.empty() && field.empty() && !quoted_field) {
                any = false; // blank line
                continue;
            }
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) fail(ErrorCode::parse, "unterminated quoted field at end of input");
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

std::optional<uint8_t> parse_target_value(std::string_view text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "0" || t == "false") return 0;
    if (t == "1" || t == "true") return 1;
    return std::nullopt;
}

Dataset parse_csv(std::istream& in, const SchemaHint& hint, const CsvOptions& options) {
    std::vector<std::string> header;
    if (!read_csv_record(in, options.delimiter, header)) {
        fail(ErrorCode::parse, "missing header row");
    }
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j].empty()) {
            fail(ErrorCode::schema, "header column " + std::to_string(j) + " has no name");
        }
        if (!position.emplace(header[j], j).second) {
            fail(ErrorCode::schema, "duplicate header name '" + header[j] + "'");
        }
    }

    std::optional<std::string> target = options.target;
    std::size_t hinted_targets = 0;
    for (const auto& [name, kind] : hint.kinds) {
        if (kind == HintKind::target) {
            ++hinted_targets;
            if (!options.target) target = name;
        }
        if (!position.count(name) && !(kind == HintKind::target && !options.require_target)) {
            fail(ErrorCode::schema, "schema hint names column '" + name + "' absent from header");
        }
    }
    if (hinted_targets > 1 && !options.target) {
        fail(ErrorCode::schema, "schema hint declares more than one target column");
    }
    if (target && !position.count(*target)) {
        if (options.require_target) {
            fail(ErrorCode::schema, "target column '" + *target + "' absent from header");
        }
        target.reset();
    }
    if (!target && options.require_target) {
        fail(ErrorCode::schema, "no target column declared");
    }

    std::vector<std::vector<std::string>> cells(header.size());
    std::vector<std::string> record;
    std::size_t line = 1;
    while (read_csv_record(in, options.delimiter, record)) {
        ++line;
        if (record.size() != header.size()) {
            fail(ErrorCode::parse, "record " + std::to_string(line) + " has " +
                                       std::to_string(record.size()) + " fields, header has " +
                                       std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < record.size(); ++j) cells[j].push_back(std::move(record[j]));
    }
    const std::size_t n_rows = cells.empty() ? 0 : cells[0].size();

    std::vector<FeatureColumn> features;
    std::vector<uint8_t> target_values;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const std::string& name = header[j];
        auto& column = cells[j];
        if (target && name == *target) {
            target_values.reserve(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                const auto y = parse_target_value(column[r]);
                if (!y) {
                    fail(ErrorCode::parse, "target column '" + name + "', record " +
                                               std::to_string(r + 2) + ": '" + column[r] +
                                               "' is not one of 0/1/true/false");
                }
                target_values.push_back(*y);
            }
            continue;
        }
        HintKind kind;
        if (const auto it = hint.kinds.find(name); it != hint.kinds.end()) {
            kind = it->second;
            if (kind == HintKind::target) kind = HintKind::ignore; // superseded target
        } else {
            kind = std::all_of(column.begin(), column.end(),
                               [](const std::string& c) { return parse_numeric_cell(c).has_value(); })
                       ? HintKind::numerical
                       : HintKind::categorical;
        }
        if (kind == HintKind::ignore) continue;

        if (kind == HintKind::numerical) {
            std::vector<double> values;
            values.reserve(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                const auto v = parse_numeric_cell(column[r]);
                if (!v) {
                    fail(ErrorCode::parse, "numerical column '" + name + "', record " +
                                               std::to_string(r + 2) + ": cannot parse '" +
                                               column[r] + "'");
                }
                values.push_back(*v);
            }
            features.push_back(FeatureColumn::numerical(name, std::move(values)));
        } else {
            auto dictionary = std::make_shared<Dictionary>();
            std::unordered_map<std::string, uint32_t> lookup;
            std::vector<uint32_t> codes;
            codes.reserve(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                std::string raw = column[r].empty() ? std::string(kMissingCategory) : std::move(column[r]);
                auto [it, inserted] = lookup.try_emplace(raw, static_cast<uint32_t>(dictionary->size()));
                if (inserted) dictionary->push_back(std::move(raw));
                codes.push_back(it->second);
            }
            features.push_back(FeatureColumn::categorical(name, std::move(codes), std::move(dictionary)));
        }
        column.clear();
        column.shrink_to_fit();
    }

    if (!target) {
        if (features.empty()) fail(ErrorCode::schema, "no feature columns loaded");
        return Dataset(std::move(features), std::nullopt, {});
    }
    return Dataset(std::move(features), target, std::move(target_values));
}

Dataset load_csv(const std::filesystem::path& path, const SchemaHint& hint,
                 const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    try {
        return parse_csv(in, hint, options);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Splitting and sampling

void SplitSpec::validate() const {
    require(train_frac > 0.0 && valid_frac > 0.0 && test_frac > 0.0,
            "split fractions must be positive");
    require(std::abs(train_frac + valid_frac + test_frac - 1.0) <= 1e-9,
            "split fractions must sum to 1");
}

SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec) {
    spec.validate();
    require(n_rows >= 10, "split requires at least 10 rows, got " + std::to_string(n_rows));
    const auto n = static_cast<double>(n_rows);
    const auto n_valid = static_cast<std::size_t>(std::floor(spec.valid_frac * n));
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_frac * n));
    if (n_valid == 0 || n_test == 0 || n_valid + n_test >= n_rows) {
        fail(ErrorCode::invalid_argument, "split leaves an empty partition for " +
                                              std::to_string(n_rows) + " rows");
    }
    const std::size_t n_train = n_rows - n_valid - n_test;

    Rng rng(spec.seed);
    const auto perm = rng.permutation(n_rows);
    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.valid.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                     perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), perm.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.valid.begin(), out.valid.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

DatasetSplit split(const Dataset& ds, const SplitSpec& spec) {
    const auto idx = split_indices(ds.n_rows(), spec);
    return {ds.take(idx.train), ds.take(idx.valid), ds.take(idx.test)};
}

Dataset subsample(const Dataset& ds, double fraction, uint64_t seed) {
    require(fraction > 0.0 && fraction <= 1.0, "subsample fraction must be in (0, 1]");
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ds.n_rows())));
    if (k == 0) fail(ErrorCode::invalid_argument, "subsample would produce an empty dataset");
    Rng rng(seed);
    auto perm = rng.permutation(ds.n_rows());
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return ds.take(perm);
}

std::vector<uint32_t> remap_codes(const FeatureColumn& column, const Dictionary& reference) {
    if (column.dictionary.get() == &reference) return column.codes;
    std::unordered_map<std::string_view, uint32_t> lookup;
    lookup.reserve(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
        lookup.emplace(reference[i], static_cast<uint32_t>(i));
    }
    std::vector<uint32_t> translation(column.dictionary->size(), kUnseenCode);
    for (std::size_t i = 0; i < column.dictionary->size(); ++i) {
        if (const auto it = lookup.find((*column.dictionary)[i]); it != lookup.end()) {
            translation[i] = it->second;
        }
    }
    std::vector<uint32_t> out;
    out.reserve(column.codes.size());
    for (uint32_t code : column.codes) out.push_back(translation[code]);
    return out;
}

} // namespace ctrboost
