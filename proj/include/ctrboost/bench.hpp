#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctrboost/config.hpp"
#include "ctrboost/data.hpp"
#include "ctrboost/encode.hpp"
#include "ctrboost/gbdt.hpp"
#include "ctrboost/metrics.hpp"

namespace ctrboost {

inline constexpr uint32_t kExperimentSpecVersion = 1;
inline constexpr uint32_t kReportSchemaVersion = 1;
/// Illustrative on-demand price used when no rate is configured.
inline constexpr double kDefaultHourlyRateUsd = 0.616;

enum class RetrainPolicy : uint8_t { never, every_window };
enum class WindowMode : uint8_t { count, time };

std::string_view to_string(RetrainPolicy policy);
std::string_view to_string(WindowMode mode);

/// Accumulated cost of `wall_seconds` at an hourly rate.
double cost_usd(double wall_seconds, double rate_usd_per_hour);

struct CostSettings {
    uint32_t checkpoint_every = 10;
    double rate_usd_per_hour = kDefaultHourlyRateUsd;
};

struct StalenessSettings {
    uint32_t windows = 10;
    uint32_t warmup = 2;
    std::vector<RetrainPolicy> policies{RetrainPolicy::never, RetrainPolicy::every_window};
    std::string time_column; // empty: keep row order
    WindowMode window_mode = WindowMode::count;
};

/// Everything needed to reproduce a benchmark run. Stored as a versioned
/// key-value file; see docs/experiment_spec.md.
struct ExperimentSpec {
    std::string data;   // CSV path; empty when the dataset is supplied in memory
    std::string schema; // schema hint path, optional
    std::optional<std::string> target;
    char delimiter = ',';
    double subsample = 1.0;
    SplitSpec split;     // split.seed is ignored; repeat r uses seed + r
    uint64_t seed = 0;
    uint32_t repeats = 10;
    uint32_t threads = 1;
    EncoderSpec encoder; // native_passthrough selects native categorical splits
    GBDTConfig gbdt;     // cat_mode follows the encoder
    CostSettings cost;
    StalenessSettings staleness;

    void validate() const;

    static ExperimentSpec from_config(const KeyValueFile& file);
    static ExperimentSpec read(const std::filesystem::path& path);
    KeyValueFile to_config() const;

    /// Applies one `key = value` override with the same rules as the file.
    void set(const std::string& key, const std::string& value);

    uint64_t repeat_seed(uint32_t repeat) const { return seed + repeat; }
    /// Learner config for one repeat: seed, threads and cat_mode filled in.
    GBDTConfig learner(uint32_t repeat) const;
    EncoderSpec encoder_for(uint32_t repeat) const;
};

/// Loads spec.data with spec.schema and applies spec.subsample (once, with
/// the base seed).
Dataset load_experiment_data(const ExperimentSpec& spec);

struct RunRecord {
    uint32_t repeat = 0;
    uint64_t seed = 0;
    EvalResult test;
    EvalResult valid;
    uint32_t n_trees = 0;
    uint32_t iterations_run = 0;
    double train_seconds = 0.0; // timing, excluded from determinism checks
};

struct MetricSummary {
    std::string metric;
    std::vector<double> values;
    double mean = 0.0;
    std::optional<double> half_width; // absent for a single run
    std::size_t n_runs = 0;
};

struct ExperimentResult {
    std::string mode; // encoder mode label
    std::vector<RunRecord> runs;
    MetricSummary logloss;
    std::optional<MetricSummary> auroc; // absent when no run had both classes
    bool best_logloss = false;
    bool best_auroc = false;
};

struct CostCurvePoint {
    uint32_t iteration = 0;   // boosting rounds completed
    uint32_t n_trees = 0;     // trees in the evaluated ensemble
    double wall_seconds = 0.0;
    double cost_usd = 0.0;
    std::optional<double> valid_auroc;
    double valid_logloss = 0.0;
    bool final = false;       // the model train() returned
};

struct StalenessPoint {
    uint32_t window = 0;
    RetrainPolicy policy = RetrainPolicy::never;
    std::size_t n_rows = 0;
    std::size_t n_train_rows = 0;
    std::optional<double> auroc; // absent for a single-class window
    double logloss = 0.0;
};

struct StalenessSummary {
    RetrainPolicy policy = RetrainPolicy::never;
    std::optional<double> mean_auroc;
    double mean_logloss = 0.0;
    std::size_t n_windows = 0;
};

enum class ReportKind : uint8_t { experiment, ablation, cost_curve, staleness };
std::string_view to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view text);

struct Report {
    uint32_t schema_version = kReportSchemaVersion;
    ReportKind kind = ReportKind::experiment;
    std::string generator;
    std::string commit;
    ExperimentSpec spec;
    std::vector<ExperimentResult> results;  // experiment: one; ablation: one per mode
    std::vector<CostCurvePoint> cost_curve;
    std::vector<StalenessPoint> staleness;
    std::vector<StalenessSummary> staleness_summary;
    std::vector<std::string> notes;
};

std::string version_string();
std::string commit_id();

/// Seeded split, encode, train with early stopping on valid, evaluate on
/// test; repeated spec.repeats times and aggregated.
Report run_experiment(const ExperimentSpec& spec);
Report run_experiment(const ExperimentSpec& spec, const Dataset& data);

/// One experiment per encoder mode, sharing splits and learner seeds.
Report run_ablation(const ExperimentSpec& spec, const std::vector<EncoderMode>& modes);
Report run_ablation(const ExperimentSpec& spec, const Dataset& data,
                    const std::vector<EncoderMode>& modes);

/// Records wall time, accumulated cost and validation AUROC every
/// spec.cost.checkpoint_every rounds of the first repeat.
Report track_cost_curve(const ExperimentSpec& spec);
Report track_cost_curve(const ExperimentSpec& spec, const Dataset& data);

/// Cuts the stream into windows and evaluates each retrain policy on every
/// window after the warmup.
Report simulate_staleness(const ExperimentSpec& spec);
Report simulate_staleness(const ExperimentSpec& spec, const Dataset& data);

/// True when both reports carry identical metric values, tree counts and
/// seeds; timing fields are ignored.
bool same_metrics(const Report& a, const Report& b);

/// Re-executes the experiment spec embedded in a report (same kind, same modes).
Report rerun_report(const Report& report);

enum class ReportFormat : uint8_t { json, csv };
ReportFormat parse_report_format(std::string_view text);

std::string render_report(const Report& report, ReportFormat format);
void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path);
Report parse_report(std::string_view json_text);
Report load_report(const std::filesystem::path& path);

/// External prediction files: CSV `row_id,probability`, one row per input
/// row. Rows may appear in any order; ids must cover 0..n-1 exactly once.
void write_predictions(const std::vector<double>& probabilities, const std::filesystem::path& path);
std::vector<double> read_predictions(const std::filesystem::path& path);

} // namespace ctrboost
