#include "ctrboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "ctrboost/error.hpp"

namespace ctrboost {

double logloss(std::span<const uint8_t> y, std::span<const double> p, double eps) {
    require(y.size() == p.size(), "logloss: label and probability lengths differ");
    require(!y.empty(), "logloss: empty input");
    require(eps > 0.0 && eps < 0.5, "logloss: eps must lie in (0, 0.5)");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = std::clamp(p[i], eps, 1.0 - eps);
        total += y[i] ? std::log(q) : std::log1p(-q);
    }
    return -total / static_cast<double>(y.size());
}

double auroc(std::span<const uint8_t> y, std::span<const double> scores) {
    require(y.size() == scores.size(), "auroc: label and score lengths differ");
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::isnan(scores[i])) fail(ErrorCode::invalid_argument, "auroc: NaN score");
        n_pos += y[i] ? 1 : 0;
    }
    const std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        fail(ErrorCode::undefined_metric, "auroc undefined: input contains a single class");
    }

    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of 1-based midranks over positives; every term is a multiple of
    // 1/2, so the sum is exact in double precision.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t pos_in_group = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            pos_in_group += y[order[j]] ? 1 : 0;
            ++j;
        }
        const double midrank = static_cast<double>(i + 1 + j) / 2.0;
        positive_rank_sum += midrank * static_cast<double>(pos_in_group);
        i = j;
    }
    const double p = static_cast<double>(n_pos);
    const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(n_neg));
}

EvalResult evaluate(std::span<const uint8_t> y, std::span<const double> p) {
    EvalResult out;
    out.n_rows = y.size();
    out.logloss = logloss(y, p);
    const auto positives = std::count(y.begin(), y.end(), uint8_t{1});
    if (positives > 0 && static_cast<std::size_t>(positives) < y.size()) out.auroc = auroc(y, p);
    return out;
}

double normal_critical_value(double confidence) {
    require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 0.5 + confidence / 2.0);
}

RunAggregate aggregate_runs(std::span<const double> values, double confidence, std::string metric) {
    require(values.size() >= 2, "aggregate_runs needs at least two values");
    RunAggregate agg;
    agg.metric = std::move(metric);
    agg.values.assign(values.begin(), values.end());
    agg.n_runs = values.size();
    agg.confidence = confidence;
    const double n = static_cast<double>(values.size());
    agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    // A sample of identical values must report exactly that value.
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
        agg.mean = values[0];
        agg.half_width = 0.0;
        return agg;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    agg.mean = std::clamp(agg.mean, *lo, *hi);
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    agg.half_width = normal_critical_value(confidence) * sd / std::sqrt(n);
    return agg;
}

} // namespace ctrboost
