#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctrboost {

inline constexpr double kDefaultLoglossEps = 1e-15;

/// Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].
double logloss(std::span<const uint8_t> y, std::span<const double> p,
               double eps = kDefaultLoglossEps);

/// Mann-Whitney AUROC with midranks for ties. Throws
/// Error(undefined_metric) unless both classes are present.
double auroc(std::span<const uint8_t> y, std::span<const double> scores);

struct EvalResult {
    double logloss = 0.0;
    std::optional<double> auroc; // unset for single-class inputs
    std::size_t n_rows = 0;
};

EvalResult evaluate(std::span<const uint8_t> y, std::span<const double> p);

struct RunAggregate {
    std::string metric;
    std::vector<double> values;
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t n_runs = 0;
    double confidence = 0.95;
};

/// Two-sided standard normal critical value (1.959964 for 0.95).
double normal_critical_value(double confidence);

/// mean +/- z * s / sqrt(n), s the sample standard deviation.
RunAggregate aggregate_runs(std::span<const double> values, double confidence = 0.95,
                            std::string metric = {});

} // namespace ctrboost
