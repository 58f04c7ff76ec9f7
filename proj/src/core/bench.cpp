#include "ctrboost/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ctrboost/error.hpp"
#include "ctrboost/rng.hpp"

#ifndef CTRBOOST_GIT_COMMIT
#define CTRBOOST_GIT_COMMIT "unknown"
#endif

namespace ctrboost {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

RetrainPolicy parse_policy(std::string_view text) {
    if (text == "never") return RetrainPolicy::never;
    if (text == "every_window") return RetrainPolicy::every_window;
    fail(ErrorCode::parse, "unknown retrain policy '" + std::string(text) + "'");
}

WindowMode parse_window_mode(std::string_view text) {
    if (text == "count") return WindowMode::count;
    if (text == "time") return WindowMode::time;
    fail(ErrorCode::parse, "unknown window mode '" + std::string(text) + "'");
}

uint32_t parse_u32(const std::string& text, const std::string& key) {
    const uint64_t v = parse_uint(text, key);
    if (v > 0xFFFFFFFFull) fail(ErrorCode::parse, key + ": value out of range");
    return static_cast<uint32_t>(v);
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t") return '\t';
    if (text.size() != 1) fail(ErrorCode::parse, "delimiter must be one character or 'tab'");
    return text[0];
}

std::string render_delimiter(char c) { return c == '\t' ? "tab" : std::string(1, c); }

} // namespace

std::string_view to_string(RetrainPolicy policy) {
    return policy == RetrainPolicy::never ? "never" : "every_window";
}

std::string_view to_string(WindowMode mode) { return mode == WindowMode::count ? "count" : "time"; }

std::string_view to_string(ReportKind kind) {
    switch (kind) {
    case ReportKind::experiment: return "experiment";
    case ReportKind::ablation: return "ablation";
    case ReportKind::cost_curve: return "cost_curve";
    case ReportKind::staleness: return "staleness";
    }
    return "experiment";
}

ReportKind parse_report_kind(std::string_view text) {
    for (auto k : {ReportKind::experiment, ReportKind::ablation, ReportKind::cost_curve,
                   ReportKind::staleness}) {
        if (to_string(k) == text) return k;
    }
    fail(ErrorCode::parse, "unknown report kind '" + std::string(text) + "'");
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") return ReportFormat::json;
    if (text == "csv") return ReportFormat::csv;
    fail(ErrorCode::invalid_argument, "unknown report format '" + std::string(text) + "'");
}

double cost_usd(double wall_seconds, double rate_usd_per_hour) {
    return wall_seconds / 3600.0 * rate_usd_per_hour;
}

std::string version_string() { return "ctrboost 0.1.0"; }
std::string commit_id() { return CTRBOOST_GIT_COMMIT; }

// ---------------------------------------------------------------- spec

void ExperimentSpec::validate() const {
    require(repeats >= 1, "repeats must be at least 1");
    require(threads >= 1, "threads must be at least 1");
    require(subsample > 0.0 && subsample <= 1.0, "subsample must lie in (0, 1]");
    split.validate();
    encoder.validate();
    learner(0).validate();
    require(cost.checkpoint_every >= 1, "cost.checkpoint_every must be at least 1");
    require(std::isfinite(cost.rate_usd_per_hour) && cost.rate_usd_per_hour >= 0.0,
            "cost.rate_usd_per_hour must be finite and non-negative");
    require(staleness.windows >= 3, "staleness.windows must be at least 3");
    require(staleness.warmup >= 1 && staleness.warmup < staleness.windows,
            "staleness.warmup must lie in [1, windows)");
    require(!staleness.policies.empty(), "staleness.policies must not be empty");
    require(staleness.window_mode == WindowMode::count || !staleness.time_column.empty(),
            "time windows need staleness.time_column");
}

GBDTConfig ExperimentSpec::learner(uint32_t repeat) const {
    GBDTConfig cfg = gbdt;
    cfg.seed = repeat_seed(repeat);
    cfg.n_threads = threads;
    cfg.cat_mode = encoder.mode == EncoderMode::native_passthrough ? CategoricalMode::native
                                                                  : CategoricalMode::encoded;
    return cfg;
}

EncoderSpec ExperimentSpec::encoder_for(uint32_t repeat) const {
    EncoderSpec enc = encoder;
    enc.seed = repeat_seed(repeat);
    return enc;
}

void ExperimentSpec::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "version") {
        if (parse_uint(v, key) != kExperimentSpecVersion) {
            fail(ErrorCode::version, "unsupported experiment spec version " + v + " (expected " +
                                         std::to_string(kExperimentSpecVersion) + ")");
        }
    } else if (key == "data") {
        data = v;
    } else if (key == "schema") {
        schema = v;
    } else if (key == "target") {
        if (v.empty()) target.reset();
        else target = v;
    } else if (key == "delimiter") {
        delimiter = parse_delimiter(v);
    } else if (key == "subsample") {
        subsample = parse_double(v, key);
    } else if (key == "split.train") {
        split.train_frac = parse_double(v, key);
    } else if (key == "split.valid") {
        split.valid_frac = parse_double(v, key);
    } else if (key == "split.test") {
        split.test_frac = parse_double(v, key);
    } else if (key == "seed") {
        seed = parse_uint(v, key);
    } else if (key == "repeats") {
        repeats = parse_u32(v, key);
    } else if (key == "threads") {
        threads = parse_u32(v, key);
    } else if (key == "encoder") {
        encoder.mode = parse_encoder_mode(v);
    } else if (key == "encoder.smoothing") {
        encoder.smoothing = parse_double(v, key);
    } else if (key == "encoder.k_folds") {
        encoder.k_folds = parse_u32(v, key);
    } else if (key == "encoder.permutations") {
        encoder.n_permutations = parse_u32(v, key);
    } else if (key == "encoder.prior") {
        if (v.empty()) encoder.prior.reset();
        else encoder.prior = parse_double(v, key);
    } else if (key == "gbdt.n_trees") {
        gbdt.n_trees = parse_u32(v, key);
    } else if (key == "gbdt.learning_rate") {
        gbdt.learning_rate = parse_double(v, key);
    } else if (key == "gbdt.max_depth") {
        gbdt.max_depth = parse_u32(v, key);
    } else if (key == "gbdt.lambda") {
        gbdt.lambda = parse_double(v, key);
    } else if (key == "gbdt.gamma") {
        gbdt.gamma = parse_double(v, key);
    } else if (key == "gbdt.min_child_weight") {
        gbdt.min_child_weight = parse_double(v, key);
    } else if (key == "gbdt.max_bins") {
        gbdt.max_bins = parse_u32(v, key);
    } else if (key == "gbdt.early_stopping_rounds") {
        gbdt.early_stopping_rounds = parse_u32(v, key);
    } else if (key == "cost.checkpoint_every") {
        cost.checkpoint_every = parse_u32(v, key);
    } else if (key == "cost.rate_usd_per_hour") {
        cost.rate_usd_per_hour = parse_double(v, key);
    } else if (key == "staleness.windows") {
        staleness.windows = parse_u32(v, key);
    } else if (key == "staleness.warmup") {
        staleness.warmup = parse_u32(v, key);
    } else if (key == "staleness.policies") {
        staleness.policies.clear();
        for (const auto& p : split_list(v)) staleness.policies.push_back(parse_policy(p));
    } else if (key == "staleness.time_column") {
        staleness.time_column = v;
    } else if (key == "staleness.window_mode") {
        staleness.window_mode = parse_window_mode(v);
    } else {
        fail(ErrorCode::parse, "unknown experiment spec key '" + key + "'");
    }
}

ExperimentSpec ExperimentSpec::from_config(const KeyValueFile& file) {
    ExperimentSpec spec;
    for (const auto& [key, value] : file.entries()) spec.set(key, value);
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::read(const std::filesystem::path& path) {
    const auto file = KeyValueFile::read(path);
    try {
        return from_config(file);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

KeyValueFile ExperimentSpec::to_config() const {
    KeyValueFile f;
    f.set("version", std::to_string(kExperimentSpecVersion));
    f.set("data", data);
    f.set("schema", schema);
    f.set("target", target.value_or(""));
    f.set("delimiter", render_delimiter(delimiter));
    f.set("subsample", format_double(subsample));
    f.set("split.train", format_double(split.train_frac));
    f.set("split.valid", format_double(split.valid_frac));
    f.set("split.test", format_double(split.test_frac));
    f.set("seed", std::to_string(seed));
    f.set("repeats", std::to_string(repeats));
    f.set("threads", std::to_string(threads));
    f.set("encoder", std::string(to_string(encoder.mode)));
    f.set("encoder.smoothing", format_double(encoder.smoothing));
    f.set("encoder.k_folds", std::to_string(encoder.k_folds));
    f.set("encoder.permutations", std::to_string(encoder.n_permutations));
    f.set("encoder.prior", encoder.prior ? format_double(*encoder.prior) : "");
    f.set("gbdt.n_trees", std::to_string(gbdt.n_trees));
    f.set("gbdt.learning_rate", format_double(gbdt.learning_rate));
    f.set("gbdt.max_depth", std::to_string(gbdt.max_depth));
    f.set("gbdt.lambda", format_double(gbdt.lambda));
    f.set("gbdt.gamma", format_double(gbdt.gamma));
    f.set("gbdt.min_child_weight", format_double(gbdt.min_child_weight));
    f.set("gbdt.max_bins", std::to_string(gbdt.max_bins));
    f.set("gbdt.early_stopping_rounds", std::to_string(gbdt.early_stopping_rounds));
    f.set("cost.checkpoint_every", std::to_string(cost.checkpoint_every));
    f.set("cost.rate_usd_per_hour", format_double(cost.rate_usd_per_hour));
    f.set("staleness.windows", std::to_string(staleness.windows));
    f.set("staleness.warmup", std::to_string(staleness.warmup));
    std::vector<std::string> policies;
    for (auto p : staleness.policies) policies.emplace_back(to_string(p));
    f.set("staleness.policies", join(policies, ','));
    f.set("staleness.time_column", staleness.time_column);
    f.set("staleness.window_mode", std::string(to_string(staleness.window_mode)));
    return f;
}

Dataset load_experiment_data(const ExperimentSpec& spec) {
    require(!spec.data.empty(), "experiment spec has no data path");
    const SchemaHint hint = spec.schema.empty() ? SchemaHint{} : SchemaHint::read(spec.schema);
    CsvOptions options;
    options.delimiter = spec.delimiter;
    options.target = spec.target;
    Dataset ds = load_csv(spec.data, hint, options);
    if (spec.subsample < 1.0) ds = subsample(ds, spec.subsample, spec.seed);
    return ds;
}

// ---------------------------------------------------------------- runs

namespace {

struct RepeatOutcome {
    RunRecord record;
    Model model;
};

RepeatOutcome run_repeat(const ExperimentSpec& spec, const Dataset& data, uint32_t repeat,
                         const IterationCallback& callback = {}) {
    SplitSpec split_spec = spec.split;
    split_spec.seed = spec.repeat_seed(repeat);
    const DatasetSplit parts = split(data, split_spec);

    RepeatOutcome out;
    const auto start = Clock::now();
    out.model = train(parts.train, &parts.valid, spec.learner(repeat), spec.encoder_for(repeat),
                      callback);
    out.record.train_seconds = seconds_since(start);
    out.record.repeat = repeat;
    out.record.seed = spec.repeat_seed(repeat);
    out.record.test = evaluate(parts.test.target(), out.model.predict(parts.test));
    out.record.valid = evaluate(parts.valid.target(), out.model.predict(parts.valid));
    out.record.n_trees = static_cast<uint32_t>(out.model.trees.size());
    out.record.iterations_run = out.model.metadata.iterations_run;
    return out;
}

MetricSummary summarize(const std::string& metric, const std::vector<double>& values) {
    MetricSummary s;
    s.metric = metric;
    s.values = values;
    s.n_runs = values.size();
    if (values.size() == 1) {
        s.mean = values.front();
    } else {
        const RunAggregate agg = aggregate_runs(values, 0.95, metric);
        s.mean = agg.mean;
        s.half_width = agg.half_width;
    }
    return s;
}

ExperimentResult run_mode(const ExperimentSpec& spec, const Dataset& data) {
    ExperimentResult result;
    result.mode = std::string(to_string(spec.encoder.mode));
    std::vector<double> losses, aurocs;
    for (uint32_t r = 0; r < spec.repeats; ++r) {
        try {
            result.runs.push_back(run_repeat(spec, data, r).record);
        } catch (const Error& e) {
            throw Error(e.code(), "repeat " + std::to_string(r) + " (seed " +
                                      std::to_string(spec.repeat_seed(r)) + ", encoder " +
                                      result.mode + "): " + e.what());
        }
        const auto& rec = result.runs.back();
        losses.push_back(rec.test.logloss);
        if (rec.test.auroc) aurocs.push_back(*rec.test.auroc);
    }
    result.logloss = summarize("logloss", losses);
    if (!aurocs.empty()) result.auroc = summarize("auroc", aurocs);
    return result;
}

Report base_report(const ExperimentSpec& spec, ReportKind kind) {
    Report report;
    report.kind = kind;
    report.generator = version_string();
    report.commit = commit_id();
    report.spec = spec;
    report.notes.push_back("ci: mean +/- z(0.975) * sample_sd / sqrt(n_runs), normal approximation");
    report.notes.push_back("seeds: repeat r uses seed + r for split, encoder and learner");
    report.notes.push_back("split: uniform random, not stratified");
    report.notes.push_back("train_seconds and wall_seconds are timings and vary between runs");
    return report;
}

} // namespace

Report run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    return run_experiment(spec, load_experiment_data(spec));
}

Report run_experiment(const ExperimentSpec& spec, const Dataset& data) {
    spec.validate();
    Report report = base_report(spec, ReportKind::experiment);
    report.results.push_back(run_mode(spec, data));
    return report;
}

Report run_ablation(const ExperimentSpec& spec, const std::vector<EncoderMode>& modes) {
    spec.validate();
    return run_ablation(spec, load_experiment_data(spec), modes);
}

Report run_ablation(const ExperimentSpec& spec, const Dataset& data,
                    const std::vector<EncoderMode>& modes) {
    spec.validate();
    require(modes.size() >= 2, "ablation needs at least two encoder modes");
    Report report = base_report(spec, ReportKind::ablation);
    for (EncoderMode mode : modes) {
        ExperimentSpec s = spec;
        s.encoder.mode = mode;
        report.results.push_back(run_mode(s, data));
    }
    auto& rs = report.results;
    const auto best_ll = std::min_element(rs.begin(), rs.end(), [](const auto& a, const auto& b) {
        return a.logloss.mean < b.logloss.mean;
    });
    best_ll->best_logloss = true;
    std::optional<std::size_t> best_auc;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].auroc && (!best_auc || rs[i].auroc->mean > rs[*best_auc].auroc->mean)) best_auc = i;
    }
    if (best_auc) rs[*best_auc].best_auroc = true;
    return report;
}

Report track_cost_curve(const ExperimentSpec& spec) {
    spec.validate();
    return track_cost_curve(spec, load_experiment_data(spec));
}

Report track_cost_curve(const ExperimentSpec& spec, const Dataset& data) {
    spec.validate();
    Report report = base_report(spec, ReportKind::cost_curve);
    report.notes.push_back("cost: wall_seconds / 3600 * rate_usd_per_hour; rate is illustrative");

    SplitSpec split_spec = spec.split;
    split_spec.seed = spec.repeat_seed(0);
    const DatasetSplit parts = split(data, split_spec);
    const auto valid_y = parts.valid.target();
    const double rate = spec.cost.rate_usd_per_hour;
    const auto to_cost = [rate](double wall) { return cost_usd(wall, rate); };

    // Checkpoint bookkeeping is excluded from the measured training time.
    const auto start = Clock::now();
    double excluded = 0.0;
    std::vector<CostCurvePoint> points;
    const IterationCallback callback = [&](uint32_t n_trees, std::span<const double> raw) {
        if (n_trees % spec.cost.checkpoint_every != 0) return;
        const auto enter = Clock::now();
        CostCurvePoint pt;
        pt.iteration = n_trees;
        pt.n_trees = n_trees;
        pt.wall_seconds = std::max(seconds_since(start) - excluded,
                                   points.empty() ? 0.0 : points.back().wall_seconds);
        pt.cost_usd = to_cost(pt.wall_seconds);
        std::vector<double> p(raw.size());
        std::transform(raw.begin(), raw.end(), p.begin(), sigmoid);
        const EvalResult ev = evaluate(valid_y, p);
        pt.valid_auroc = ev.auroc;
        pt.valid_logloss = ev.logloss;
        points.push_back(pt);
        excluded += seconds_since(enter);
    };
    const Model model = train(parts.train, &parts.valid, spec.learner(0), spec.encoder_for(0), callback);
    const double total = seconds_since(start) - excluded;

    CostCurvePoint last;
    last.iteration = model.metadata.iterations_run;
    last.n_trees = static_cast<uint32_t>(model.trees.size());
    last.wall_seconds = std::max(total, points.empty() ? 0.0 : points.back().wall_seconds);
    last.cost_usd = to_cost(last.wall_seconds);
    const EvalResult ev = evaluate(valid_y, model.predict(parts.valid));
    last.valid_auroc = ev.auroc;
    last.valid_logloss = ev.logloss;
    last.final = true;
    points.push_back(last);
    report.cost_curve = std::move(points);
    return report;
}

// ---------------------------------------------------------------- staleness

namespace {

/// Row ranges [bounds[i], bounds[i+1]) of the time-ordered stream.
std::vector<std::size_t> window_bounds(const ExperimentSpec& spec, const std::vector<double>& time) {
    const std::size_t n = time.size();
    const std::size_t w = spec.staleness.windows;
    std::vector<std::size_t> bounds(w + 1);
    if (spec.staleness.window_mode == WindowMode::count) {
        for (std::size_t i = 0; i <= w; ++i) bounds[i] = i * n / w;
    } else {
        const double lo = time.front(), hi = time.back();
        require(hi > lo, "time windows need a non-constant time column");
        for (std::size_t i = 0; i <= w; ++i) {
            if (i == w) {
                bounds[i] = n;
                break;
            }
            const double edge = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(w);
            bounds[i] = static_cast<std::size_t>(
                std::lower_bound(time.begin(), time.end(), edge) - time.begin());
        }
    }
    for (std::size_t i = 0; i < w; ++i) {
        require(bounds[i + 1] > bounds[i], "staleness window " + std::to_string(i) + " is empty");
    }
    return bounds;
}

std::vector<std::size_t> iota_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    return rows;
}

/// Trains on `history` with a seeded 10% validation slice for early stopping.
Model train_on_history(const ExperimentSpec& spec, const Dataset& history) {
    const GBDTConfig cfg = spec.learner(0);
    const EncoderSpec enc = spec.encoder_for(0);
    if (cfg.early_stopping_rounds == 0 || history.n_rows() < 10) {
        GBDTConfig plain = cfg;
        plain.early_stopping_rounds = 0;
        return train(history, nullptr, plain, enc);
    }
    Rng rng(spec.seed);
    auto perm = rng.permutation(history.n_rows());
    const std::size_t n_valid = history.n_rows() / 10;
    std::vector<std::size_t> valid_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_valid));
    std::vector<std::size_t> train_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_valid), perm.end());
    std::sort(valid_rows.begin(), valid_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    const Dataset tr = history.take(train_rows);
    const Dataset va = history.take(valid_rows);
    return train(tr, &va, cfg, enc);
}

} // namespace

Report simulate_staleness(const ExperimentSpec& spec) {
    spec.validate();
    return simulate_staleness(spec, load_experiment_data(spec));
}

Report simulate_staleness(const ExperimentSpec& spec, const Dataset& data) {
    spec.validate();
    const auto& st = spec.staleness;
    require(data.n_rows() >= st.windows, "stream has fewer rows than windows");

    // Order by time and drop the time column from the features.
    Dataset stream = data;
    std::vector<double> time(data.n_rows());
    std::iota(time.begin(), time.end(), 0.0);
    if (!st.time_column.empty()) {
        const auto idx = data.find_feature(st.time_column);
        if (!idx) fail(ErrorCode::schema, "time column '" + st.time_column + "' not found");
        const auto& col = data.feature(*idx);
        require(!col.is_categorical(), "time column '" + st.time_column + "' must be numerical");
        for (double v : col.values) {
            require(!std::isnan(v), "time column '" + st.time_column + "' has missing values");
        }
        std::vector<std::size_t> order(data.n_rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return col.values[a] < col.values[b]; });
        std::vector<FeatureColumn> kept;
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            if (j != *idx) kept.push_back(data.feature(j));
        }
        require(!kept.empty(), "no features left after removing the time column");
        stream = data.with_features(std::move(kept)).take(order);
        for (std::size_t i = 0; i < order.size(); ++i) time[i] = col.values[order[i]];
    }
    const auto bounds = window_bounds(spec, time);

    Report report = base_report(spec, ReportKind::staleness);
    report.notes.push_back("windows: " + std::string(to_string(st.window_mode)) + " based, " +
                           std::to_string(st.windows) + " windows, " + std::to_string(st.warmup) +
                           " warmup");
    for (RetrainPolicy policy : st.policies) {
        std::optional<Model> model;
        std::size_t trained_rows = 0;
        std::vector<double> aurocs, losses;
        for (uint32_t w = st.warmup; w < st.windows; ++w) {
            const bool retrain = !model || policy == RetrainPolicy::every_window;
            if (retrain) {
                const std::size_t end = policy == RetrainPolicy::never ? bounds[st.warmup] : bounds[w];
                const auto rows = iota_range(0, end);
                model = train_on_history(spec, stream.take(rows));
                trained_rows = end;
            }
            const Dataset window = stream.take(iota_range(bounds[w], bounds[w + 1]));
            const EvalResult ev = evaluate(window.target(), model->predict(window));
            StalenessPoint pt;
            pt.window = w;
            pt.policy = policy;
            pt.n_rows = window.n_rows();
            pt.n_train_rows = trained_rows;
            pt.auroc = ev.auroc;
            pt.logloss = ev.logloss;
            report.staleness.push_back(pt);
            if (ev.auroc) aurocs.push_back(*ev.auroc);
            losses.push_back(ev.logloss);
        }
        StalenessSummary summary;
        summary.policy = policy;
        summary.n_windows = losses.size();
        summary.mean_logloss = std::accumulate(losses.begin(), losses.end(), 0.0) /
                               static_cast<double>(losses.size());
        if (!aurocs.empty()) {
            summary.mean_auroc = std::accumulate(aurocs.begin(), aurocs.end(), 0.0) /
                                 static_cast<double>(aurocs.size());
        }
        report.staleness_summary.push_back(summary);
    }
    return report;
}

namespace {

bool same_eval(const EvalResult& a, const EvalResult& b) {
    return a.logloss == b.logloss && a.auroc == b.auroc && a.n_rows == b.n_rows;
}

bool same_summary(const MetricSummary& a, const MetricSummary& b) {
    return a.values == b.values && a.mean == b.mean && a.half_width == b.half_width;
}

} // namespace

bool same_metrics(const Report& a, const Report& b) {
    if (a.kind != b.kind || a.results.size() != b.results.size() ||
        a.cost_curve.size() != b.cost_curve.size() || a.staleness.size() != b.staleness.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        const auto& x = a.results[i];
        const auto& y = b.results[i];
        if (x.mode != y.mode || x.runs.size() != y.runs.size() || !same_summary(x.logloss, y.logloss) ||
            x.auroc.has_value() != y.auroc.has_value() || (x.auroc && !same_summary(*x.auroc, *y.auroc)) ||
            x.best_logloss != y.best_logloss || x.best_auroc != y.best_auroc) {
            return false;
        }
        for (std::size_t r = 0; r < x.runs.size(); ++r) {
            const auto& u = x.runs[r];
            const auto& v = y.runs[r];
            if (u.repeat != v.repeat || u.seed != v.seed || !same_eval(u.test, v.test) ||
                !same_eval(u.valid, v.valid) || u.n_trees != v.n_trees ||
                u.iterations_run != v.iterations_run) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < a.cost_curve.size(); ++i) {
        const auto& u = a.cost_curve[i];
        const auto& v = b.cost_curve[i];
        if (u.iteration != v.iteration || u.n_trees != v.n_trees || u.valid_auroc != v.valid_auroc ||
            u.valid_logloss != v.valid_logloss || u.final != v.final) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.staleness.size(); ++i) {
        const auto& u = a.staleness[i];
        const auto& v = b.staleness[i];
        if (u.window != v.window || u.policy != v.policy || u.n_rows != v.n_rows ||
            u.n_train_rows != v.n_train_rows || u.auroc != v.auroc || u.logloss != v.logloss) {
            return false;
        }
    }
    return true;
}

Report rerun_report(const Report& report) {
    const ExperimentSpec& spec = report.spec;
    switch (report.kind) {
    case ReportKind::experiment: return run_experiment(spec);
    case ReportKind::ablation: {
        std::vector<EncoderMode> modes;
        for (const auto& r : report.results) modes.push_back(parse_encoder_mode(r.mode));
        return run_ablation(spec, modes);
    }
    case ReportKind::cost_curve: return track_cost_curve(spec);
    case ReportKind::staleness: return simulate_staleness(spec);
    }
    fail(ErrorCode::internal, "unhandled report kind");
}

// ---------------------------------------------------------------- JSON

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json eval_json(const EvalResult& e) {
    return json{{"logloss", e.logloss}, {"auroc", opt(e.auroc)}, {"n_rows", e.n_rows}};
}

EvalResult eval_from(const json& j) {
    EvalResult e;
    e.logloss = j.at("logloss").get<double>();
    e.auroc = opt_double(j.at("auroc"));
    e.n_rows = j.at("n_rows").get<std::size_t>();
    return e;
}

json summary_json(const MetricSummary& s) {
    return json{{"metric", s.metric},
                {"mean", s.mean},
                {"half_width", opt(s.half_width)},
                {"n_runs", s.n_runs},
                {"values", s.values}};
}

MetricSummary summary_from(const json& j) {
    MetricSummary s;
    s.metric = j.at("metric").get<std::string>();
    s.mean = j.at("mean").get<double>();
    s.half_width = opt_double(j.at("half_width"));
    s.n_runs = j.at("n_runs").get<std::size_t>();
    s.values = j.at("values").get<std::vector<double>>();
    return s;
}

json report_json(const Report& r) {
    json spec = json::object();
    const KeyValueFile spec_file = r.spec.to_config();
    for (const auto& [k, v] : spec_file.entries()) spec[k] = v;

    json results = json::array();
    for (const auto& res : r.results) {
        json runs = json::array();
        for (const auto& run : res.runs) {
            runs.push_back(json{{"repeat", run.repeat},
                                {"seed", run.seed},
                                {"test", eval_json(run.test)},
                                {"valid", eval_json(run.valid)},
                                {"n_trees", run.n_trees},
                                {"iterations_run", run.iterations_run},
                                {"train_seconds", run.train_seconds}});
        }
        results.push_back(json{{"mode", res.mode},
                               {"best_logloss", res.best_logloss},
                               {"best_auroc", res.best_auroc},
                               {"logloss", summary_json(res.logloss)},
                               {"auroc", res.auroc ? summary_json(*res.auroc) : json(nullptr)},
                               {"runs", runs}});
    }
    json curve = json::array();
    for (const auto& p : r.cost_curve) {
        curve.push_back(json{{"iteration", p.iteration},
                             {"n_trees", p.n_trees},
                             {"wall_seconds", p.wall_seconds},
                             {"cost_usd", p.cost_usd},
                             {"valid_auroc", opt(p.valid_auroc)},
                             {"valid_logloss", p.valid_logloss},
                             {"final", p.final}});
    }
    json stale = json::array();
    for (const auto& p : r.staleness) {
        stale.push_back(json{{"window", p.window},
                             {"policy", to_string(p.policy)},
                             {"n_rows", p.n_rows},
                             {"n_train_rows", p.n_train_rows},
                             {"auroc", opt(p.auroc)},
                             {"logloss", p.logloss}});
    }
    json stale_summary = json::array();
    for (const auto& s : r.staleness_summary) {
        stale_summary.push_back(json{{"policy", to_string(s.policy)},
                                     {"mean_auroc", opt(s.mean_auroc)},
                                     {"mean_logloss", s.mean_logloss},
                                     {"n_windows", s.n_windows}});
    }
    return json{{"schema_version", r.schema_version},
                {"kind", to_string(r.kind)},
                {"generator", r.generator},
                {"commit", r.commit},
                {"spec", spec},
                {"results", results},
                {"cost_curve", curve},
                {"staleness", stale},
                {"staleness_summary", stale_summary},
                {"notes", r.notes}};
}

Report report_from(const json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<uint32_t>();
    if (r.schema_version != kReportSchemaVersion) {
        fail(ErrorCode::version, "unsupported report schema version " +
                                     std::to_string(r.schema_version));
    }
    r.kind = parse_report_kind(j.at("kind").get<std::string>());
    r.generator = j.at("generator").get<std::string>();
    r.commit = j.at("commit").get<std::string>();
    KeyValueFile spec_file;
    for (const auto& [k, v] : j.at("spec").items()) spec_file.set(k, v.get<std::string>());
    r.spec = ExperimentSpec::from_config(spec_file);

    for (const auto& jr : j.at("results")) {
        ExperimentResult res;
        res.mode = jr.at("mode").get<std::string>();
        res.best_logloss = jr.at("best_logloss").get<bool>();
        res.best_auroc = jr.at("best_auroc").get<bool>();
        res.logloss = summary_from(jr.at("logloss"));
        if (!jr.at("auroc").is_null()) res.auroc = summary_from(jr.at("auroc"));
        for (const auto& jrun : jr.at("runs")) {
            RunRecord run;
            run.repeat = jrun.at("repeat").get<uint32_t>();
            run.seed = jrun.at("seed").get<uint64_t>();
            run.test = eval_from(jrun.at("test"));
            run.valid = eval_from(jrun.at("valid"));
            run.n_trees = jrun.at("n_trees").get<uint32_t>();
            run.iterations_run = jrun.at("iterations_run").get<uint32_t>();
            run.train_seconds = jrun.at("train_seconds").get<double>();
            res.runs.push_back(run);
        }
        r.results.push_back(std::move(res));
    }
    for (const auto& jp : j.at("cost_curve")) {
        CostCurvePoint p;
        p.iteration = jp.at("iteration").get<uint32_t>();
        p.n_trees = jp.at("n_trees").get<uint32_t>();
        p.wall_seconds = jp.at("wall_seconds").get<double>();
        p.cost_usd = jp.at("cost_usd").get<double>();
        p.valid_auroc = opt_double(jp.at("valid_auroc"));
        p.valid_logloss = jp.at("valid_logloss").get<double>();
        p.final = jp.at("final").get<bool>();
        r.cost_curve.push_back(p);
    }
    for (const auto& jp : j.at("staleness")) {
        StalenessPoint p;
        p.window = jp.at("window").get<uint32_t>();
        p.policy = parse_policy(jp.at("policy").get<std::string>());
        p.n_rows = jp.at("n_rows").get<std::size_t>();
        p.n_train_rows = jp.at("n_train_rows").get<std::size_t>();
        p.auroc = opt_double(jp.at("auroc"));
        p.logloss = jp.at("logloss").get<double>();
        r.staleness.push_back(p);
    }
    for (const auto& js : j.at("staleness_summary")) {
        StalenessSummary s;
        s.policy = parse_policy(js.at("policy").get<std::string>());
        s.mean_auroc = opt_double(js.at("mean_auroc"));
        s.mean_logloss = js.at("mean_logloss").get<double>();
        s.n_windows = js.at("n_windows").get<std::size_t>();
        r.staleness_summary.push_back(s);
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string render_csv(const Report& r) {
    std::ostringstream out;
    switch (r.kind) {
    case ReportKind::experiment:
        out << "repeat,seed,test_logloss,test_auroc,valid_logloss,valid_auroc,n_trees,train_seconds\n";
        for (const auto& run : r.results.at(0).runs) {
            out << run.repeat << ',' << run.seed << ',' << format_double(run.test.logloss) << ','
                << cell(run.test.auroc) << ',' << format_double(run.valid.logloss) << ','
                << cell(run.valid.auroc) << ',' << run.n_trees << ','
                << format_double(run.train_seconds) << '\n';
        }
        break;
    case ReportKind::ablation:
        out << "mode,logloss_mean,logloss_hw,auroc_mean,auroc_hw\n";
        for (const auto& res : r.results) {
            out << res.mode << ',' << format_double(res.logloss.mean) << ','
                << cell(res.logloss.half_width) << ','
                << (res.auroc ? format_double(res.auroc->mean) : "") << ','
                << (res.auroc ? cell(res.auroc->half_width) : "") << '\n';
        }
        break;
    case ReportKind::cost_curve:
        out << "iteration,n_trees,wall_seconds,cost_usd,valid_auroc,valid_logloss,final\n";
        for (const auto& p : r.cost_curve) {
            out << p.iteration << ',' << p.n_trees << ',' << format_double(p.wall_seconds) << ','
                << format_double(p.cost_usd) << ',' << cell(p.valid_auroc) << ','
                << format_double(p.valid_logloss) << ',' << (p.final ? 1 : 0) << '\n';
        }
        break;
    case ReportKind::staleness:
        out << "window,policy,n_rows,n_train_rows,auroc,logloss\n";
        for (const auto& p : r.staleness) {
            out << p.window << ',' << to_string(p.policy) << ',' << p.n_rows << ','
                << p.n_train_rows << ',' << cell(p.auroc) << ',' << format_double(p.logloss) << '\n';
        }
        break;
    }
    return out.str();
}

} // namespace

std::string render_report(const Report& report, ReportFormat format) {
    if (format == ReportFormat::csv) return render_csv(report);
    return report_json(report).dump(2) + "\n";
}

void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
    const std::string text = render_report(report, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

Report parse_report(std::string_view json_text) {
    try {
        return report_from(json::parse(json_text));
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed report: ") + e.what());
    }
}

Report load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_report(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- predictions

void write_predictions(const std::vector<double>& probabilities, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            fail(ErrorCode::invalid_argument, "probability for row " + std::to_string(i) + " is outside [0, 1]");
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    out << "row_id,probability\n";
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        out << i << ',' << format_double(probabilities[i]) << '\n';
    }
    if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

std::vector<double> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    const std::string where = path.string() + ": ";
    std::vector<std::string> fields;
    if (!read_csv_record(in, ',', fields) || fields.size() != 2 || trim(fields[0]) != "row_id" ||
        trim(fields[1]) != "probability") {
        fail(ErrorCode::parse, where + "expected header 'row_id,probability'");
    }
    std::vector<std::pair<uint64_t, double>> rows;
    std::size_t line = 1;
    while (read_csv_record(in, ',', fields)) {
        ++line;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        const std::string at = where + "line " + std::to_string(line) + ": ";
        if (fields.size() != 2) fail(ErrorCode::parse, at + "expected 2 fields");
        try {
            const uint64_t id = parse_uint(trim(fields[0]), "row_id");
            const double p = parse_double(trim(fields[1]), "probability");
            if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::parse, "probability outside [0, 1]");
            rows.emplace_back(id, p);
        } catch (const Error& e) {
            fail(ErrorCode::parse, at + e.what());
        }
    }
    std::vector<double> out(rows.size());
    std::vector<bool> seen(rows.size(), false);
    for (const auto& [id, p] : rows) {
        if (id >= rows.size()) {
            fail(ErrorCode::parse, where + "row_id " + std::to_string(id) + " out of range 0.." +
                                       std::to_string(rows.size() - 1));
        }
        if (seen[id]) fail(ErrorCode::parse, where + "duplicate row_id " + std::to_string(id));
        seen[id] = true;
        out[id] = p;
    }
    return out;
}

} // namespace ctrboost
