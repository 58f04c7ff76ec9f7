#include "ctrboost/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "ctrboost/config.hpp"
#include "ctrboost/error.hpp"
#include "ctrboost/rng.hpp"

namespace ctrboost::synth {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

/// Builds a categorical column from raw labels, first-appearance coding.
class CategoricalBuilder {
public:
    explicit CategoricalBuilder(std::string name) : name_(std::move(name)) {}
    void push(const std::string& raw) {
        auto [it, inserted] = index_.try_emplace(raw, static_cast<uint32_t>(dict_->size()));
        if (inserted) dict_->push_back(raw);
        codes_.push_back(it->second);
    }
    FeatureColumn finish() { return FeatureColumn::categorical(name_, std::move(codes_), dict_); }

private:
    std::string name_;
    std::shared_ptr<Dictionary> dict_ = std::make_shared<Dictionary>();
    std::map<std::string, uint32_t> index_;
    std::vector<uint32_t> codes_;
};

/// Index in [0, n) with probability proportional to 1 / (k + 1).
class ZipfSampler {
public:
    explicit ZipfSampler(std::size_t n) : cdf_(n) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            total += 1.0 / static_cast<double>(k + 1);
            cdf_[k] = total;
        }
        for (double& c : cdf_) c /= total;
    }
    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

} // namespace

Dataset make_ctr(const CtrSpec& spec) {
    require(spec.n_rows > 0 && spec.n_categorical >= 2 && spec.cardinality >= 2,
            "make_ctr needs rows, at least two categorical columns and cardinality >= 2");
    Rng rng(spec.seed);
    std::vector<std::vector<double>> effect(spec.n_categorical, std::vector<double>(spec.cardinality));
    for (std::size_t c = 0; c < spec.n_categorical; ++c) {
        const double scale = 0.8 / std::sqrt(1.0 + static_cast<double>(c));
        for (auto& e : effect[c]) e = rng.normal() * scale;
    }
    std::vector<double> interaction(spec.cardinality * spec.cardinality);
    for (auto& e : interaction) e = rng.normal() * 0.7;
    std::vector<double> weights(spec.n_numerical);
    for (auto& w : weights) w = rng.normal() * 0.4;

    const ZipfSampler zipf(spec.cardinality);
    std::vector<CategoricalBuilder> cats;
    for (std::size_t c = 0; c < spec.n_categorical; ++c) cats.emplace_back("c" + std::to_string(c));
    std::vector<std::vector<double>> nums(spec.n_numerical, std::vector<double>(spec.n_rows));
    std::vector<uint8_t> y(spec.n_rows);
    const double base = logit(spec.base_rate);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        double score = base;
        std::size_t first = 0, second = 0;
        for (std::size_t c = 0; c < spec.n_categorical; ++c) {
            const std::size_t k = zipf.draw(rng);
            if (c == 0) first = k;
            if (c == 1) second = k;
            score += effect[c][k];
            cats[c].push("v" + std::to_string(k));
        }
        score += interaction[first * spec.cardinality + second];
        for (std::size_t j = 0; j < spec.n_numerical; ++j) {
            const double x = rng.normal();
            nums[j][r] = x;
            score += weights[j] * x;
        }
        y[r] = rng.bernoulli(logistic(score)) ? 1 : 0;
    }
    std::vector<FeatureColumn> features;
    for (auto& c : cats) features.push_back(c.finish());
    for (std::size_t j = 0; j < spec.n_numerical; ++j) {
        features.push_back(FeatureColumn::numerical("x" + std::to_string(j), std::move(nums[j])));
    }
    return Dataset(std::move(features), std::string("click"), std::move(y));
}

Dataset make_leakage_hazard(const LeakageSpec& spec) {
    require(spec.n_rows > 0 && spec.n_head_ids > 0 && spec.n_tail_ids > 0,
            "make_leakage_hazard needs rows, head ids and tail ids");
    require(spec.tail_share >= 0.0 && spec.tail_share <= 1.0, "tail_share must lie in [0, 1]");
    Rng rng(spec.seed);
    std::vector<double> tail_effect(spec.n_tail_ids);
    for (auto& e : tail_effect) e = rng.normal() * spec.tail_effect_sd;
    std::vector<double> head_effect(spec.n_head_ids);
    for (auto& e : head_effect) e = rng.normal() * spec.head_effect_sd;
    std::vector<double> head_interaction(spec.n_head_ids);
    for (auto& e : head_interaction) e = rng.normal() * spec.interaction_sd;

    constexpr std::size_t kContexts = 8;
    CategoricalBuilder id("id");
    CategoricalBuilder ctx("context");
    std::vector<double> x(spec.n_rows);
    std::vector<uint8_t> y(spec.n_rows);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        const std::size_t c = rng.uniform_index(kContexts);
        const double sign = c < kContexts / 2 ? 1.0 : -1.0;
        x[r] = rng.normal();
        double score = -0.5 + spec.context_effect * sign + 0.5 * x[r];
        if (rng.uniform01() < spec.tail_share) {
            const std::size_t t = rng.uniform_index(spec.n_tail_ids);
            score += tail_effect[t];
            id.push("t" + std::to_string(t));
        } else {
            const std::size_t h = rng.uniform_index(spec.n_head_ids);
            score += head_effect[h] + sign * head_interaction[h];
            id.push("h" + std::to_string(h));
        }
        y[r] = rng.bernoulli(logistic(score)) ? 1 : 0;
        ctx.push("c" + std::to_string(c));
    }
    return Dataset({id.finish(), ctx.finish(), FeatureColumn::numerical("x", std::move(x))},
                   std::string("click"), std::move(y));
}

Dataset make_drift_stream(const DriftSpec& spec) {
    require(spec.n_windows >= 3, "drift stream needs at least 3 windows");
    require(spec.drift_window >= 1 && spec.drift_window < spec.n_windows,
            "drift_window must lie inside the stream");
    require(spec.rows_per_window > 0 && spec.pool_size > 0, "drift stream needs rows and items");
    Rng rng(spec.seed);
    constexpr std::size_t kSegments = 6;
    std::vector<double> segment_effect(kSegments);
    for (auto& e : segment_effect) e = rng.normal() * 0.4;

    // Item generation g is live from window g (pre-drift: generation 0 for
    // every window) and for one window after it.
    std::map<std::size_t, std::vector<double>> generations;
    auto generation = [&](std::size_t g) -> const std::vector<double>& {
        auto it = generations.find(g);
        if (it == generations.end()) {
            std::vector<double> effects(spec.pool_size);
            for (auto& e : effects) e = rng.normal() * spec.item_effect_sd;
            it = generations.emplace(g, std::move(effects)).first;
        }
        return it->second;
    };
    generation(0);

    CategoricalBuilder user("user_segment");
    CategoricalBuilder item("item");
    std::vector<double> t, ctx;
    std::vector<uint8_t> y;
    const std::size_t n = spec.n_windows * spec.rows_per_window;
    t.reserve(n);
    ctx.reserve(n);
    y.reserve(n);
    for (std::size_t w = 0; w < spec.n_windows; ++w) {
        std::vector<std::size_t> live{0};
        if (!spec.stationary && w >= spec.drift_window) {
            live = {w};
            if (w > spec.drift_window) live.push_back(w - 1);
        }
        for (std::size_t r = 0; r < spec.rows_per_window; ++r) {
            const std::size_t g = live[rng.uniform_index(live.size())];
            const std::size_t k = rng.uniform_index(spec.pool_size);
            const std::size_t s = rng.uniform_index(kSegments);
            const double c = rng.normal();
            const double score = -0.8 + generation(g)[k] + segment_effect[s] + 0.3 * c;
            t.push_back(static_cast<double>(w * spec.rows_per_window + r));
            ctx.push_back(c);
            y.push_back(rng.bernoulli(logistic(score)) ? 1 : 0);
            user.push("seg" + std::to_string(s));
            item.push("g" + std::to_string(g) + "_i" + std::to_string(k));
        }
    }
    return Dataset({FeatureColumn::numerical("t", std::move(t)), user.finish(), item.finish(),
                    FeatureColumn::numerical("ctx", std::move(ctx))},
                   std::string("click"), std::move(y));
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        if (j) out << ',';
        out << csv_escape(ds.feature(j).meta.name);
    }
    if (ds.has_target()) out << (ds.n_features() ? "," : "") << csv_escape(ds.target_name());
    out << '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t j = 0; j < ds.n_features(); ++j) {
            if (j) out << ',';
            const auto& col = ds.feature(j);
            if (col.is_categorical()) {
                const auto& raw = col.category(r);
                if (raw != kMissingCategory) out << csv_escape(raw);
            } else if (!std::isnan(col.values[r])) {
                out << format_double(col.values[r]);
            }
        }
        if (ds.has_target()) out << (ds.n_features() ? "," : "") << int(ds.target()[r]);
        out << '\n';
    }
    if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

} // namespace ctrboost::synth
