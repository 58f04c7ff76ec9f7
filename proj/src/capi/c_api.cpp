#include "ctrboost/c_api.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <new>
#include <optional>
#include <set>
#include <string>
#include <typeindex>
#include <typeinfo>
#include <unordered_map>
#include <vector>

#include "ctrboost/bench.hpp"
#include "ctrboost/error.hpp"
#include "ctrboost/model_io.hpp"

using namespace ctrboost;

struct ctb_dataset {
    Dataset data;
};
struct ctb_model {
    Model model;
};
struct ctb_spec {
    ExperimentSpec spec;
};
struct ctb_report {
    Report report;
};

namespace {

thread_local std::string g_last_error;

/// Live handles with their type, for double-free, stale and mistyped handles.
class Registry {
public:
    void add(const void* p, std::type_index type) {
        std::lock_guard lock(mutex_);
        live_.insert_or_assign(p, type);
    }
    bool contains(const void* p, std::type_index type) const {
        std::lock_guard lock(mutex_);
        const auto it = live_.find(p);
        return it != live_.end() && it->second == type;
    }
    bool remove(const void* p, std::type_index type) {
        std::lock_guard lock(mutex_);
        const auto it = live_.find(p);
        if (it == live_.end() || it->second != type) return false;
        live_.erase(it);
        return true;
    }

private:
    mutable std::mutex mutex_;
    std::unordered_map<const void*, std::type_index> live_;
};

Registry& registry() {
    static Registry r;
    return r;
}

template <class F>
int guarded(F&& body) {
    try {
        body();
        return CTB_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CTB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = std::string("internal error: ") + e.what();
        return CTB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "internal error";
        return CTB_ERR_INTERNAL;
    }
}

template <class T>
const T& live(const T* handle, const char* what) {
    if (handle == nullptr) fail(ErrorCode::invalid_argument, std::string(what) + " handle is NULL");
    if (!registry().contains(handle, typeid(T))) {
        fail(ErrorCode::invalid_handle, std::string(what) + " handle is not live");
    }
    return *handle;
}

template <class T>
T& live_mut(T* handle, const char* what) {
    return const_cast<T&>(live(static_cast<const T*>(handle), what));
}

template <class T>
void publish(T* object, T** out) {
    registry().add(object, typeid(T));
    *out = object;
}

template <class T>
int release(T* handle, const char* what) {
    return guarded([&] {
        if (handle == nullptr) fail(ErrorCode::invalid_argument, std::string(what) + " handle is NULL");
        if (!registry().remove(handle, typeid(T))) {
            fail(ErrorCode::invalid_handle, std::string(what) + " handle is not live (already released?)");
        }
        delete handle;
    });
}

void need(const void* p, const char* what) {
    if (p == nullptr) fail(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

void need_capacity(std::size_t capacity, std::size_t needed) {
    if (capacity < needed) {
        fail(ErrorCode::buffer_too_small, "buffer holds " + std::to_string(capacity) +
                                              " elements, need " + std::to_string(needed));
    }
}

int copy_text(const std::string& text, char* buffer, std::size_t capacity, std::size_t* needed) {
    return guarded([&] {
        need(needed, "needed");
        *needed = text.size() + 1;
        if (buffer == nullptr || capacity < text.size() + 1) {
            fail(ErrorCode::buffer_too_small, "text needs " + std::to_string(text.size() + 1) + " bytes");
        }
        std::memcpy(buffer, text.c_str(), text.size() + 1);
    });
}

struct TrainSettings {
    GBDTConfig config;
    EncoderSpec encoder;
};

std::vector<std::pair<std::string, std::string>> collect_pairs(const char* const* keys,
                                                               const char* const* values,
                                                               std::size_t n) {
    if (n > 0) {
        need(keys, "keys");
        need(values, "values");
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
        need(keys[i], "config key");
        need(values[i], "config value");
        if (!seen.insert(keys[i]).second) {
            fail(ErrorCode::invalid_argument, std::string("config key '") + keys[i] + "' given twice");
        }
        pairs.emplace_back(keys[i], trim(values[i]));
    }
    return pairs;
}

uint32_t to_u32(const std::string& text, const std::string& key) {
    const uint64_t v = parse_uint(text, key);
    if (v > 0xFFFFFFFFull) fail(ErrorCode::invalid_argument, key + ": value out of range");
    return static_cast<uint32_t>(v);
}

/// Applies one encoder key; false when the key is not an encoder field.
bool apply_encoder_key(EncoderSpec& enc, const std::string& key, const std::string& v) {
    if (key == "encoder") enc.mode = parse_encoder_mode(v);
    else if (key == "smoothing") enc.smoothing = parse_double(v, key);
    else if (key == "k_folds") enc.k_folds = to_u32(v, key);
    else if (key == "n_permutations") enc.n_permutations = to_u32(v, key);
    else if (key == "prior") enc.prior = parse_double(v, key);
    else if (key == "seed") enc.seed = parse_uint(v, key);
    else return false;
    return true;
}

TrainSettings parse_train_settings(const std::vector<std::pair<std::string, std::string>>& pairs,
                                   bool has_valid) {
    TrainSettings s;
    bool early_stopping_set = false;
    std::optional<CategoricalMode> cat_mode;
    for (const auto& [key, v] : pairs) {
        try {
            if (apply_encoder_key(s.encoder, key, v)) {
                if (key == "seed") s.config.seed = s.encoder.seed;
            } else if (key == "n_trees") s.config.n_trees = to_u32(v, key);
            else if (key == "learning_rate") s.config.learning_rate = parse_double(v, key);
            else if (key == "max_depth") s.config.max_depth = to_u32(v, key);
            else if (key == "lambda") s.config.lambda = parse_double(v, key);
            else if (key == "gamma") s.config.gamma = parse_double(v, key);
            else if (key == "min_child_weight") s.config.min_child_weight = parse_double(v, key);
            else if (key == "max_bins") s.config.max_bins = to_u32(v, key);
            else if (key == "early_stopping_rounds") {
                s.config.early_stopping_rounds = to_u32(v, key);
                early_stopping_set = true;
            } else if (key == "n_threads") s.config.n_threads = to_u32(v, key);
            else if (key == "cat_mode") {
                if (v == "native") cat_mode = CategoricalMode::native;
                else if (v == "encoded") cat_mode = CategoricalMode::encoded;
                else fail(ErrorCode::invalid_argument, "cat_mode must be 'native' or 'encoded'");
            } else {
                fail(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
            }
        } catch (const Error& e) {
            // Bad values are argument errors at this boundary.
            throw Error(ErrorCode::invalid_argument, e.what());
        }
    }
    if (!has_valid && !early_stopping_set) s.config.early_stopping_rounds = 0;
    const CategoricalMode implied = s.encoder.mode == EncoderMode::native_passthrough
                                        ? CategoricalMode::native
                                        : CategoricalMode::encoded;
    if (cat_mode && *cat_mode != implied) {
        fail(ErrorCode::invalid_argument, "cat_mode '" + std::string(to_string(*cat_mode)) +
                                              "' conflicts with encoder '" +
                                              std::string(to_string(s.encoder.mode)) + "'");
    }
    s.config.cat_mode = implied;
    s.config.validate();
    s.encoder.validate();
    return s;
}

FeatureColumn column_from(const ctb_column& c, std::size_t n_rows, std::size_t index) {
    const std::string where = "column " + std::to_string(index);
    need(c.name, (where + " name").c_str());
    const std::string name = c.name;
    if (c.kind == CTB_COLUMN_NUMERICAL) {
        if (n_rows > 0) need(c.values, (where + " values").c_str());
        return FeatureColumn::numerical(name, std::vector<double>(c.values, c.values + n_rows));
    }
    if (c.kind != CTB_COLUMN_CATEGORICAL) {
        fail(ErrorCode::invalid_argument, where + " has unknown kind " + std::to_string(c.kind));
    }
    if (n_rows > 0) need(c.codes, (where + " codes").c_str());
    if (c.n_categories > 0) need(c.categories, (where + " categories").c_str());
    auto dict = std::make_shared<Dictionary>();
    std::unordered_map<std::string, uint32_t> index_of;
    for (std::size_t k = 0; k < c.n_categories; ++k) {
        need(c.categories[k], (where + " category").c_str());
        if (!index_of.emplace(c.categories[k], static_cast<uint32_t>(k)).second) {
            fail(ErrorCode::invalid_argument,
                 where + " repeats category '" + std::string(c.categories[k]) + "'");
        }
        dict->emplace_back(c.categories[k]);
    }
    std::optional<uint32_t> missing_code;
    std::vector<uint32_t> codes(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const int32_t code = c.codes[r];
        if (code == -1) {
            if (!missing_code) {
                const auto it = index_of.find(std::string(kMissingCategory));
                if (it != index_of.end()) {
                    missing_code = it->second;
                } else {
                    missing_code = static_cast<uint32_t>(dict->size());
                    dict->emplace_back(kMissingCategory);
                }
            }
            codes[r] = *missing_code;
        } else if (code < 0 || static_cast<std::size_t>(code) >= c.n_categories) {
            fail(ErrorCode::invalid_argument, where + " row " + std::to_string(r) + ": code " +
                                                  std::to_string(code) + " out of range");
        } else {
            codes[r] = static_cast<uint32_t>(code);
        }
    }
    return FeatureColumn::categorical(name, std::move(codes), std::move(dict));
}

} // namespace

extern "C" {

int ctb_api_version(void) { return CTB_API_VERSION; }

const char* ctb_version_string(void) {
    static const std::string text = version_string() + " (" + commit_id() + ")";
    return text.c_str();
}

const char* ctb_last_error(void) { return g_last_error.c_str(); }

const char* ctb_status_name(int status) {
    switch (status) {
    case CTB_OK: return "ok";
    case CTB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CTB_ERR_IO: return "io";
    case CTB_ERR_PARSE: return "parse";
    case CTB_ERR_SCHEMA: return "schema";
    case CTB_ERR_VERSION: return "version";
    case CTB_ERR_CHECKSUM: return "checksum";
    case CTB_ERR_TRUNCATED: return "truncated";
    case CTB_ERR_INVALID_HANDLE: return "invalid_handle";
    case CTB_ERR_UNDEFINED_METRIC: return "undefined_metric";
    case CTB_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case CTB_ERR_INTERNAL: return "internal";
    default: return "unknown";
    }
}

// ---- datasets

int ctb_dataset_from_columns(const ctb_column* columns, size_t n_columns, size_t n_rows,
                             const uint8_t* target, const char* target_name, ctb_dataset** out) {
    return guarded([&] {
        need(out, "out");
        if (n_columns > 0) need(columns, "columns");
        std::vector<FeatureColumn> features;
        for (std::size_t j = 0; j < n_columns; ++j) features.push_back(column_from(columns[j], n_rows, j));
        std::optional<std::string> name;
        std::vector<uint8_t> y;
        if (target != nullptr) {
            name = target_name ? std::string(target_name) : std::string("target");
            y.assign(target, target + n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (y[r] > 1) {
                    fail(ErrorCode::invalid_argument,
                         "target row " + std::to_string(r) + " is not 0 or 1");
                }
            }
        }
        auto* ds = new ctb_dataset{Dataset(std::move(features), std::move(name), std::move(y))};
        if (ds->data.n_rows() != n_rows && n_columns > 0) {
            delete ds;
            fail(ErrorCode::invalid_argument, "column lengths disagree with n_rows");
        }
        publish(ds, out);
    });
}

int ctb_dataset_load_csv(const char* path, const char* schema_path, const char* target,
                         char delimiter, ctb_dataset** out) {
    return guarded([&] {
        need(out, "out");
        need(path, "path");
        const SchemaHint hint =
            schema_path && *schema_path ? SchemaHint::read(schema_path) : SchemaHint{};
        CsvOptions options;
        options.delimiter = delimiter == 0 ? ',' : delimiter;
        if (target && *target) options.target = std::string(target);
        options.require_target = false;
        publish(new ctb_dataset{load_csv(path, hint, options)}, out);
    });
}

int ctb_dataset_num_rows(const ctb_dataset* ds, size_t* out) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        need(out, "out");
        *out = d.data.n_rows();
    });
}

int ctb_dataset_num_features(const ctb_dataset* ds, size_t* out) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        need(out, "out");
        *out = d.data.n_features();
    });
}

int ctb_dataset_target(const ctb_dataset* ds, uint8_t* out, size_t capacity) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        require(d.data.has_target(), "dataset has no target");
        const auto y = d.data.target();
        need_capacity(capacity, y.size());
        if (!y.empty()) need(out, "out");
        std::copy(y.begin(), y.end(), out);
    });
}

int ctb_dataset_numeric_column(const ctb_dataset* ds, size_t index, double* out, size_t capacity) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        require(index < d.data.n_features(), "column index out of range");
        const auto& col = d.data.feature(index);
        require(!col.is_categorical(), "column '" + col.meta.name + "' is categorical");
        need_capacity(capacity, col.values.size());
        if (!col.values.empty()) need(out, "out");
        std::copy(col.values.begin(), col.values.end(), out);
    });
}

int ctb_dataset_free(ctb_dataset* ds) { return release(ds, "dataset"); }

// ---- encoders

int ctb_encode(const ctb_dataset* ds, const char* const* keys, const char* const* values,
               size_t n_pairs, ctb_dataset** out) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        need(out, "out");
        EncoderSpec spec;
        spec.mode = EncoderMode::target;
        for (const auto& [key, v] : collect_pairs(keys, values, n_pairs)) {
            try {
                if (!apply_encoder_key(spec, key, v)) {
                    fail(ErrorCode::invalid_argument, "unknown encoder key '" + key + "'");
                }
            } catch (const Error& e) {
                throw Error(ErrorCode::invalid_argument, e.what());
            }
        }
        spec.validate();
        auto encoded = fit_transform(d.data, spec);
        publish(new ctb_dataset{std::move(encoded.second)}, out);
    });
}

// ---- training and models

int ctb_train(const ctb_dataset* train_ds, const ctb_dataset* valid_ds, const char* const* keys,
              const char* const* values, size_t n_pairs, ctb_model** out) {
    return guarded([&] {
        const auto& tr = live(train_ds, "train dataset");
        const Dataset* va = valid_ds ? &live(valid_ds, "valid dataset").data : nullptr;
        need(out, "out");
        const auto settings = parse_train_settings(collect_pairs(keys, values, n_pairs), va != nullptr);
        publish(new ctb_model{train(tr.data, va, settings.config, settings.encoder)}, out);
    });
}

int ctb_train_with_spec(const ctb_dataset* train_ds, const ctb_dataset* valid_ds,
                        const ctb_spec* spec, ctb_model** out) {
    return guarded([&] {
        const auto& tr = live(train_ds, "train dataset");
        const Dataset* va = valid_ds ? &live(valid_ds, "valid dataset").data : nullptr;
        const auto& s = live(spec, "spec");
        need(out, "out");
        GBDTConfig config = s.spec.learner(0);
        require(va != nullptr || config.early_stopping_rounds == 0,
                "early stopping requires validation data; set gbdt.early_stopping_rounds = 0");
        publish(new ctb_model{train(tr.data, va, config, s.spec.encoder_for(0))}, out);
    });
}

int ctb_predict(const ctb_model* model, const ctb_dataset* ds, double* out, size_t capacity) {
    return guarded([&] {
        const auto& m = live(model, "model");
        const auto& d = live(ds, "dataset");
        need_capacity(capacity, d.data.n_rows());
        if (d.data.n_rows() == 0) return;
        need(out, "out");
        const auto p = m.model.predict(d.data);
        std::copy(p.begin(), p.end(), out);
    });
}

int ctb_model_save(const ctb_model* model, const char* path) {
    return guarded([&] {
        const auto& m = live(model, "model");
        need(path, "path");
        save_model(m.model, path);
    });
}

int ctb_model_load(const char* path, ctb_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        publish(new ctb_model{load_model(path)}, out);
    });
}

int ctb_model_num_trees(const ctb_model* model, size_t* out) {
    return guarded([&] {
        const auto& m = live(model, "model");
        need(out, "out");
        *out = m.model.trees.size();
    });
}

int ctb_model_free(ctb_model* model) { return release(model, "model"); }

// ---- metrics

int ctb_logloss(const uint8_t* y, const double* p, size_t n, double* out) {
    return guarded([&] {
        need(out, "out");
        if (n > 0) {
            need(y, "y");
            need(p, "p");
        }
        *out = logloss({y, n}, {p, n});
    });
}

int ctb_auroc(const uint8_t* y, const double* scores, size_t n, double* out) {
    return guarded([&] {
        need(out, "out");
        if (n > 0) {
            need(y, "y");
            need(scores, "scores");
        }
        *out = auroc({y, n}, {scores, n});
    });
}

int ctb_evaluate(const ctb_dataset* ds, const double* p, size_t n, double* logloss_out,
                 double* auroc_out, int* auroc_defined) {
    return guarded([&] {
        const auto& d = live(ds, "dataset");
        need(logloss_out, "logloss");
        need(auroc_out, "auroc");
        need(auroc_defined, "auroc_defined");
        require(d.data.has_target(), "dataset has no target");
        if (n != d.data.n_rows()) {
            fail(ErrorCode::schema, "prediction count " + std::to_string(n) +
                                        " does not match dataset rows " +
                                        std::to_string(d.data.n_rows()));
        }
        if (n > 0) need(p, "p");
        const EvalResult ev = evaluate(d.data.target(), {p, n});
        *logloss_out = ev.logloss;
        *auroc_defined = ev.auroc.has_value() ? 1 : 0;
        if (ev.auroc) *auroc_out = *ev.auroc;
    });
}

// ---- specs

int ctb_spec_default(ctb_spec** out) {
    return guarded([&] {
        need(out, "out");
        publish(new ctb_spec{}, out);
    });
}

int ctb_spec_load(const char* path, ctb_spec** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        publish(new ctb_spec{ExperimentSpec::read(path)}, out);
    });
}

int ctb_spec_set(ctb_spec* spec, const char* key, const char* value) {
    return guarded([&] {
        auto& s = live_mut(spec, "spec");
        need(key, "key");
        need(value, "value");
        ExperimentSpec updated = s.spec;
        updated.set(key, value);
        updated.validate();
        s.spec = std::move(updated);
    });
}

int ctb_spec_render(const ctb_spec* spec, char* buffer, size_t capacity, size_t* needed) {
    std::string text;
    const int status = guarded([&] { text = live(spec, "spec").spec.to_config().to_string(); });
    if (status != CTB_OK) return status;
    return copy_text(text, buffer, capacity, needed);
}

int ctb_spec_free(ctb_spec* spec) { return release(spec, "spec"); }

// ---- benchmark runs

int ctb_run_experiment(const ctb_spec* spec, ctb_report** out) {
    return guarded([&] {
        const auto& s = live(spec, "spec");
        need(out, "out");
        publish(new ctb_report{run_experiment(s.spec)}, out);
    });
}

int ctb_run_ablation(const ctb_spec* spec, const char* const* modes, size_t n_modes,
                     ctb_report** out) {
    return guarded([&] {
        const auto& s = live(spec, "spec");
        need(out, "out");
        if (n_modes > 0) need(modes, "modes");
        std::vector<EncoderMode> list;
        for (std::size_t i = 0; i < n_modes; ++i) {
            need(modes[i], "mode");
            list.push_back(parse_encoder_mode(modes[i]));
        }
        publish(new ctb_report{run_ablation(s.spec, list)}, out);
    });
}

int ctb_track_cost_curve(const ctb_spec* spec, ctb_report** out) {
    return guarded([&] {
        const auto& s = live(spec, "spec");
        need(out, "out");
        publish(new ctb_report{track_cost_curve(s.spec)}, out);
    });
}

int ctb_simulate_staleness(const ctb_spec* spec, ctb_report** out) {
    return guarded([&] {
        const auto& s = live(spec, "spec");
        need(out, "out");
        publish(new ctb_report{simulate_staleness(s.spec)}, out);
    });
}

// ---- reports

int ctb_report_load(const char* path, ctb_report** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        publish(new ctb_report{load_report(path)}, out);
    });
}

int ctb_report_rerun(const ctb_report* report, ctb_report** out) {
    return guarded([&] {
        const auto& r = live(report, "report");
        need(out, "out");
        publish(new ctb_report{rerun_report(r.report)}, out);
    });
}

int ctb_report_write(const ctb_report* report, const char* format, const char* path) {
    return guarded([&] {
        const auto& r = live(report, "report");
        need(format, "format");
        need(path, "path");
        emit_report(r.report, parse_report_format(format), path);
    });
}

int ctb_report_render(const ctb_report* report, const char* format, char* buffer, size_t capacity,
                      size_t* needed) {
    std::string text;
    const int status = guarded([&] {
        const auto& r = live(report, "report");
        need(format, "format");
        text = render_report(r.report, parse_report_format(format));
    });
    if (status != CTB_OK) return status;
    return copy_text(text, buffer, capacity, needed);
}

int ctb_report_same_metrics(const ctb_report* a, const ctb_report* b, int* same) {
    return guarded([&] {
        const auto& ra = live(a, "report");
        const auto& rb = live(b, "report");
        need(same, "same");
        *same = same_metrics(ra.report, rb.report) ? 1 : 0;
    });
}

int ctb_report_free(ctb_report* report) { return release(report, "report"); }

// ---- prediction files

int ctb_write_predictions(const double* p, size_t n, const char* path) {
    return guarded([&] {
        need(path, "path");
        if (n > 0) need(p, "p");
        write_predictions(std::vector<double>(p, p + n), path);
    });
}

int ctb_read_predictions(const char* path, double* out, size_t capacity, size_t* n_rows) {
    return guarded([&] {
        need(path, "path");
        need(n_rows, "n_rows");
        const auto p = read_predictions(path);
        *n_rows = p.size();
        need_capacity(out == nullptr ? 0 : capacity, p.size());
        std::copy(p.begin(), p.end(), out);
    });
}

} // extern "C"
