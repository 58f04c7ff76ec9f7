// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctrboost/c_api.h"

namespace {

struct Failure {
    int status;
};

void check(int status) {
    if (status != CTB_OK) throw Failure{status};
}

/// Owns one C handle.
template <class T, int (*Free)(T*)>
class Handle {
public:
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() {
        if (ptr_) Free(ptr_);
    }
    T** out() { return &ptr_; }
    T* get() const { return ptr_; }
    explicit operator bool() const { return ptr_ != nullptr; }

private:
    T* ptr_ = nullptr;
};

using DatasetHandle = Handle<ctb_dataset, ctb_dataset_free>;
using ModelHandle = Handle<ctb_model, ctb_model_free>;
using SpecHandle = Handle<ctb_spec, ctb_spec_free>;
using ReportHandle = Handle<ctb_report, ctb_report_free>;

struct Options {
    std::string data, schema, config, valid, model, predictions, in, out, target;
    std::string format = "json";
    std::string encoder, time_column, window_mode;
    std::optional<unsigned long long> seed;
    std::optional<unsigned> repeats, threads, checkpoint_every, windows, warmup;
    std::optional<double> rate;
    std::vector<std::string> policies, modes, sets;
    bool rerun = false;
};

void spec_set(ctb_spec* spec, const std::string& key, const std::string& value) {
    check(ctb_spec_set(spec, key.c_str(), value.c_str()));
}

/// Spec from --config (or defaults) with command-line overrides applied.
void build_spec(const Options& o, SpecHandle& spec) {
    if (!o.config.empty()) check(ctb_spec_load(o.config.c_str(), spec.out()));
    else check(ctb_spec_default(spec.out()));
    ctb_spec* s = spec.get();
    if (!o.data.empty()) spec_set(s, "data", o.data);
    if (!o.schema.empty()) spec_set(s, "schema", o.schema);
    if (!o.target.empty()) spec_set(s, "target", o.target);
    if (o.seed) spec_set(s, "seed", std::to_string(*o.seed));
    if (o.repeats) spec_set(s, "repeats", std::to_string(*o.repeats));
    if (o.threads) spec_set(s, "threads", std::to_string(*o.threads));
    if (!o.encoder.empty()) spec_set(s, "encoder", o.encoder);
    if (o.rate) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *o.rate);
        spec_set(s, "cost.rate_usd_per_hour", buf);
    }
    if (o.checkpoint_every) spec_set(s, "cost.checkpoint_every", std::to_string(*o.checkpoint_every));
    if (o.windows) spec_set(s, "staleness.windows", std::to_string(*o.windows));
    if (o.warmup) spec_set(s, "staleness.warmup", std::to_string(*o.warmup));
    if (!o.time_column.empty()) spec_set(s, "staleness.time_column", o.time_column);
    if (!o.window_mode.empty()) spec_set(s, "staleness.window_mode", o.window_mode);
    if (!o.policies.empty()) {
        std::string joined;
        for (const auto& p : o.policies) joined += (joined.empty() ? "" : ",") + p;
        spec_set(s, "staleness.policies", joined);
    }
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
        }
        spec_set(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

std::string render(const ctb_report* report, const std::string& format) {
    std::size_t needed = 0;
    const int status = ctb_report_render(report, format.c_str(), nullptr, 0, &needed);
    if (status != CTB_ERR_BUFFER_TOO_SMALL) check(status);
    std::string text(needed, '\0');
    check(ctb_report_render(report, format.c_str(), text.data(), text.size(), &needed));
    text.resize(needed - 1);
    return text;
}

void output_report(const ctb_report* report, const Options& o) {
    if (o.out.empty() || o.out == "-") {
        std::cout << render(report, o.format);
    } else {
        check(ctb_report_write(report, o.format.c_str(), o.out.c_str()));
        std::cerr << "wrote " << o.out << '\n';
    }
}

void load_dataset(const std::string& path, const Options& o, DatasetHandle& ds) {
    check(ctb_dataset_load_csv(path.c_str(), o.schema.empty() ? nullptr : o.schema.c_str(),
                               o.target.empty() ? nullptr : o.target.c_str(), ',', ds.out()));
}

std::vector<double> predict(const ctb_model* model, const ctb_dataset* ds) {
    std::size_t n = 0;
    check(ctb_dataset_num_rows(ds, &n));
    std::vector<double> p(n);
    check(ctb_predict(model, ds, p.data(), p.size()));
    return p;
}

int cmd_train(const Options& o) {
    SpecHandle spec;
    build_spec(o, spec);
    DatasetHandle train, valid;
    load_dataset(o.data, o, train);
    if (!o.valid.empty()) {
        load_dataset(o.valid, o, valid);
    } else {
        std::cerr << "no --valid given: early stopping disabled\n";
        spec_set(spec.get(), "gbdt.early_stopping_rounds", "0");
    }
    ModelHandle model;
    check(ctb_train_with_spec(train.get(), valid.get(), spec.get(), model.out()));
    check(ctb_model_save(model.get(), o.model.c_str()));
    std::size_t trees = 0;
    check(ctb_model_num_trees(model.get(), &trees));
    std::cerr << "trained " << trees << " trees, saved " << o.model << '\n';
    return 0;
}

int cmd_predict(const Options& o) {
    ModelHandle model;
    check(ctb_model_load(o.model.c_str(), model.out()));
    DatasetHandle ds;
    load_dataset(o.data, o, ds);
    const auto p = predict(model.get(), ds.get());
    check(ctb_write_predictions(p.data(), p.size(), o.out.c_str()));
    std::cerr << "wrote " << p.size() << " predictions to " << o.out << '\n';
    return 0;
}

int cmd_evaluate(const Options& o) {
    DatasetHandle ds;
    load_dataset(o.data, o, ds);
    if (o.predictions.empty() == o.model.empty()) {
        throw CLI::ValidationError("evaluate", "give exactly one of --model or --predictions");
    }
    std::vector<double> p;
    if (!o.predictions.empty()) {
        std::size_t n = 0;
        const int status = ctb_read_predictions(o.predictions.c_str(), nullptr, 0, &n);
        if (status != CTB_ERR_BUFFER_TOO_SMALL) check(status);
        p.resize(n);
        check(ctb_read_predictions(o.predictions.c_str(), p.data(), p.size(), &n));
    } else {
        ModelHandle model;
        check(ctb_model_load(o.model.c_str(), model.out()));
        p = predict(model.get(), ds.get());
    }
    double logloss = 0.0, auroc = 0.0;
    int defined = 0;
    check(ctb_evaluate(ds.get(), p.data(), p.size(), &logloss, &auroc, &defined));
    char line[160];
    if (defined) {
        std::snprintf(line, sizeof line, "{\"n_rows\": %zu, \"logloss\": %.17g, \"auroc\": %.17g}\n",
                      p.size(), logloss, auroc);
    } else {
        std::snprintf(line, sizeof line, "{\"n_rows\": %zu, \"logloss\": %.17g, \"auroc\": null}\n",
                      p.size(), logloss);
    }
    std::cout << line;
    return 0;
}

int cmd_bench(const Options& o, const std::string& which) {
    SpecHandle spec;
    build_spec(o, spec);
    ReportHandle report;
    if (which == "experiment") {
        check(ctb_run_experiment(spec.get(), report.out()));
    } else if (which == "ablate") {
        std::vector<const char*> modes;
        for (const auto& m : o.modes) modes.push_back(m.c_str());
        check(ctb_run_ablation(spec.get(), modes.data(), modes.size(), report.out()));
    } else if (which == "cost-curve") {
        check(ctb_track_cost_curve(spec.get(), report.out()));
    } else {
        check(ctb_simulate_staleness(spec.get(), report.out()));
    }
    output_report(report.get(), o);
    return 0;
}

int cmd_report(const Options& o) {
    ReportHandle report;
    check(ctb_report_load(o.in.c_str(), report.out()));
    if (!o.rerun) {
        output_report(report.get(), o);
        return 0;
    }
    ReportHandle again;
    check(ctb_report_rerun(report.get(), again.out()));
    output_report(again.get(), o);
    int same = 0;
    check(ctb_report_same_metrics(report.get(), again.get(), &same));
    std::cerr << (same ? "rerun reproduces the report metrics\n"
                       : "rerun metrics differ from the report\n");
    return same ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctrboost: gradient-boosted trees for high-cardinality categorical data"};
    app.set_version_flag("--version", std::string(ctb_version_string()));
    app.require_subcommand(1);
    Options o;

    auto add_data = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("--data", o.data, "CSV input");
        if (required) opt->required();
        c->add_option("--schema", o.schema, "schema hint file");
        c->add_option("--target", o.target, "target column name");
    };
    auto add_spec = [&](CLI::App* c) {
        c->add_option("--config", o.config, "experiment spec file");
        c->add_option("--seed", o.seed, "base seed");
        c->add_option("--encoder", o.encoder, "label|target|kfold_target|ordered_ts|native");
        c->add_option("--threads", o.threads, "histogram threads");
        c->add_option("--set", o.sets, "spec override key=value (repeatable)");
    };
    auto add_output = [&](CLI::App* c) {
        c->add_option("--out", o.out, "output path (default stdout)");
        c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* train = app.add_subcommand("train", "train a model and save it");
    add_data(train, true);
    add_spec(train);
    train->add_option("--valid", o.valid, "validation CSV for early stopping");
    train->add_option("--model,--out", o.model, "model output path")->required();

    auto* predict_cmd = app.add_subcommand("predict", "write row_id,probability predictions");
    add_data(predict_cmd, true);
    predict_cmd->add_option("--model", o.model, "model file")->required();
    predict_cmd->add_option("--out", o.out, "predictions CSV")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score a model or an external prediction file");
    add_data(evaluate, true);
    auto* by_model = evaluate->add_option("--model", o.model, "model file");
    auto* by_file = evaluate->add_option("--predictions", o.predictions, "row_id,probability CSV");
    by_model->excludes(by_file);

    auto* experiment = app.add_subcommand("experiment", "repeated split/train/evaluate runs");
    auto* ablate = app.add_subcommand("ablate", "one experiment per encoder mode");
    auto* cost = app.add_subcommand("cost-curve", "wall time, cost and AUROC during training");
    auto* stale = app.add_subcommand("staleness", "retrain-policy simulation over time windows");
    for (auto* c : {experiment, ablate, cost, stale}) {
        add_data(c, false);
        add_spec(c);
        add_output(c);
        c->add_option("--repeats", o.repeats, "number of repeats");
    }
    ablate->add_option("--modes", o.modes, "encoder modes")
        ->delimiter(',')
        ->default_str("label,target,native");
    cost->add_option("--rate-usd-per-hour", o.rate, "hourly rate (illustrative default 0.616)");
    cost->add_option("--checkpoint-every", o.checkpoint_every, "rounds between checkpoints");
    stale->add_option("--windows", o.windows, "number of windows");
    stale->add_option("--warmup", o.warmup, "warmup windows");
    stale->add_option("--policy", o.policies, "never and/or every_window")->delimiter(',');
    stale->add_option("--time-column", o.time_column, "numeric time column");
    stale->add_option("--window-mode", o.window_mode, "count or time");

    auto* report = app.add_subcommand("report", "re-render or re-run a JSON report");
    report->add_option("--in", o.in, "report JSON")->required();
    report->add_flag("--rerun", o.rerun, "re-execute the embedded spec");
    add_output(report);

    CLI11_PARSE(app, argc, argv);
    if (ablate->parsed() && o.modes.empty()) o.modes = {"label", "target", "native"};

    try {
        if (train->parsed()) return cmd_train(o);
        if (predict_cmd->parsed()) return cmd_predict(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (experiment->parsed()) return cmd_bench(o, "experiment");
        if (ablate->parsed()) return cmd_bench(o, "ablate");
        if (cost->parsed()) return cmd_bench(o, "cost-curve");
        if (stale->parsed()) return cmd_bench(o, "staleness");
        if (report->parsed()) return cmd_report(o);
    } catch (const Failure& f) {
        std::cerr << "ctrboost: error (" << ctb_status_name(f.status) << "): " << ctb_last_error()
                  << '\n';
        return f.status;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
    return 0;
}
