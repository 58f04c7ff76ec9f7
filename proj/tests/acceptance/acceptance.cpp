// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ctrboost/bench.hpp"
#include "ctrboost/encode.hpp"
#include "ctrboost/gbdt.hpp"
#include "ctrboost/histogram.hpp"
#include "ctrboost/metrics.hpp"
#include "ctrboost/model_io.hpp"
#include "ctrboost/rng.hpp"
#include "ctrboost/split.hpp"
#include "ctrboost/synthetic.hpp"
#include "oracles.hpp"

using namespace ctrboost;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- encoders

Verdict encoder_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240601);
    double worst = 0.0;
    auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(99);
        const std::size_t n_cols = 1 + rng.uniform_index(3);
        const auto y = oracle::random_labels(rng, n, 0.1 + 0.8 * rng.uniform01());
        std::vector<oracle::Categories> raw;
        std::vector<FeatureColumn> cols;
        for (std::size_t j = 0; j < n_cols; ++j) {
            raw.push_back(oracle::random_categories(rng, n, 1 + rng.uniform_index(12)));
            cols.push_back(oracle::cat_column("c" + std::to_string(j), raw.back()));
        }
        const Dataset ds = oracle::dataset(cols, y);
        const double a = rng.uniform_index(4) == 0 ? 0.0 : rng.uniform01() * 5;
        const bool fixed = rng.uniform_index(2) == 0;
        const double fixed_prior = rng.uniform01();

        EncoderSpec te;
        te.mode = EncoderMode::target;
        te.smoothing = a;
        if (fixed) te.prior = fixed_prior;
        const auto te_out = apply(fit_target_encoding(ds, te), ds);
        for (std::size_t j = 0; j < n_cols; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                track(te_out.feature(j).values[i],
                      oracle::target_encode(raw[j], y, raw[j][i], a, fixed ? fixed_prior : oracle::mean(y)));
            }
        }

        // K-fold with random folds, and leave-one-out on every other trial.
        EncoderSpec kf = te;
        kf.mode = EncoderMode::kfold_target;
        std::vector<uint32_t> folds(n);
        if (trial % 2 == 0 || n < 4) {
            kf.k_folds = static_cast<uint32_t>(n);
            const auto perm = rng.permutation(n);
            for (std::size_t i = 0; i < n; ++i) folds[i] = static_cast<uint32_t>(perm[i]);
        } else {
            kf.k_folds = 2 + static_cast<uint32_t>(rng.uniform_index(std::min<std::size_t>(n - 2, 9)));
            const auto perm = rng.permutation(n);
            for (std::size_t i = 0; i < n; ++i) folds[perm[i]] = static_cast<uint32_t>(i % kf.k_folds);
        }
        const auto kf_out = fit_apply_kfold_target_encoding(ds, kf, folds);
        for (std::size_t j = 0; j < n_cols; ++j) {
            const auto want = oracle::kfold_encode(raw[j], y, folds, a,
                                                   fixed ? std::optional<double>(fixed_prior) : std::nullopt);
            for (std::size_t i = 0; i < n; ++i) track(kf_out.values[j][i], want[i]);
        }

        EncoderSpec ot = te;
        ot.mode = EncoderMode::ordered_ts;
        const std::size_t n_perm = 1 + rng.uniform_index(4);
        std::vector<std::vector<std::size_t>> perms;
        for (std::size_t s = 0; s < n_perm; ++s) perms.push_back(rng.permutation(n));
        const auto ot_out = fit_apply_ordered_ts(ds, ot, perms);
        const double p = fixed ? fixed_prior : kDefaultOrderedPrior;
        for (std::size_t j = 0; j < n_cols; ++j) {
            std::vector<double> avg(n, 0.0);
            for (const auto& perm : perms) {
                const auto v = oracle::ordered_encode(raw[j], y, perm, a, p);
                for (std::size_t i = 0; i < n; ++i) avg[i] += v[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                track(ot_out.values[j][i], avg[i] / static_cast<double>(n_perm));
            }
        }
    }
    const double secs = seconds_since(t0);
    return verdict(worst <= 1e-12 && secs < 10.0,
                   "100 instances, max abs error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s");
}

Verdict leakage_invariance() {
    Rng rng(77);
    int changed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 4 + rng.uniform_index(80);
        const auto cats = oracle::random_categories(rng, n, 1 + rng.uniform_index(8));
        auto y = oracle::random_labels(rng, n);
        const Dataset before = oracle::dataset({oracle::cat_column("c", cats)}, y);
        const std::size_t i = rng.uniform_index(n);
        y[i] ^= 1;
        const Dataset after = oracle::dataset({oracle::cat_column("c", cats)}, y);

        EncoderSpec kf;
        kf.mode = EncoderMode::kfold_target;
        kf.k_folds = trial % 5 == 0 ? static_cast<uint32_t>(n) : 2 + static_cast<uint32_t>(rng.uniform_index(3));
        kf.smoothing = rng.uniform01() * 3;
        kf.seed = rng.next();
        EncoderSpec ot = kf;
        ot.mode = EncoderMode::ordered_ts;
        ot.n_permutations = 1 + static_cast<uint32_t>(rng.uniform_index(4));
        const double k1 = fit_apply_kfold_target_encoding(before, kf).values[0][i];
        const double k2 = fit_apply_kfold_target_encoding(after, kf).values[0][i];
        const double o1 = fit_apply_ordered_ts(before, ot).values[0][i];
        const double o2 = fit_apply_ordered_ts(after, ot).values[0][i];
        changed += (k1 != k2) + (o1 != o2);
    }
    return verdict(changed == 0, "1000 trials, " + std::to_string(changed) + " encoded values moved");
}

// ---- split search

Verdict split_optimality() {
    Rng rng(31);
    int numeric_ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 20 + rng.uniform_index(300);
        const auto n_bins = static_cast<uint32_t>(2 + rng.uniform_index(40));
        std::vector<uint32_t> bins(n);
        std::vector<double> g(n), h(n);
        for (std::size_t i = 0; i < n; ++i) {
            bins[i] = rng.uniform_index(10) == 0 ? kMissingBin : static_cast<uint32_t>(rng.uniform_index(n_bins));
            g[i] = rng.uniform01() * 2 - 1;
            h[i] = rng.uniform01() * 0.25;
        }
        const SplitParams p{rng.uniform01() * 2, rng.uniform01() * 0.05, rng.uniform01()};
        FeatureHistogram hist;
        hist.bins.resize(n_bins);
        for (std::size_t i = 0; i < n; ++i) {
            (bins[i] == kMissingBin ? hist.missing : hist.bins[bins[i]]) += BinStats{g[i], h[i], 1};
        }
        const auto got = best_numeric_split(hist, p);
        const auto want = oracle::best_numeric_cut(bins, g, h, n_bins, p.lambda, p.gamma, p.min_child_weight);
        numeric_ok += got.valid == want.valid &&
                      (!want.valid || (got.bin == want.bin && std::abs(got.gain - want.gain) <= 1e-9));
    }
    int cat_match = 0, cat_exceed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng.uniform_index(7); // k <= 8
        FeatureHistogram hist;
        std::vector<oracle::Stat> stats;
        for (std::size_t c = 0; c < k; ++c) {
            const uint64_t count = 1 + rng.uniform_index(30);
            double gs = 0.0, hs = 0.0;
            for (uint64_t r = 0; r < count; ++r) {
                const double pr = rng.uniform01();
                gs += pr - (rng.uniform01() < 0.5 ? 1.0 : 0.0);
                hs += pr * (1 - pr);
            }
            hist.bins.push_back({gs, hs, count});
            stats.push_back({gs, hs, count});
        }
        const SplitParams p{1.0, 0.0, 0.0};
        const auto got = best_categorical_split(hist, p);
        const auto want = oracle::best_partition_gain(stats, p.lambda, p.gamma, p.min_child_weight);
        if (got.valid && (!want || got.gain > *want + 1e-12)) ++cat_exceed;
        cat_match += got.valid == want.has_value() && (!got.valid || std::abs(got.gain - *want) <= 1e-9);
    }
    return verdict(numeric_ok == 200 && cat_exceed == 0 && cat_match >= 95,
                   "numeric " + std::to_string(numeric_ok) + "/200 exact; categorical " + std::to_string(cat_match) +
                       "/100 optimal, " + std::to_string(cat_exceed) + " above the exhaustive optimum");
}

// ---- objective

Verdict gradient_check() {
    Rng rng(5);
    const double step = 1e-4;
    double worst = 0.0;
    auto loss = [](double raw, uint8_t y) {
        const double p = 1.0 / (1.0 + std::exp(-raw));
        return y ? -std::log(p) : -std::log1p(-p);
    };
    for (int i = 0; i < 100; ++i) {
        const double raw = rng.uniform01() * 12 - 6;
        const uint8_t y = rng.bernoulli(0.5) ? 1 : 0;
        const auto gh = compute_grad_hess(std::vector<uint8_t>{y}, std::vector<double>{raw});
        const double fd_g = (loss(raw + step, y) - loss(raw - step, y)) / (2 * step);
        const double fd_h = (loss(raw + step, y) - 2 * loss(raw, y) + loss(raw - step, y)) / (step * step);
        worst = std::max({worst, std::abs(gh.g[0] - fd_g), std::abs(gh.h[0] - fd_h)});
    }
    return verdict(worst <= 1e-5, "100 points, max deviation " + fmt("%.3g", worst));
}

Verdict metric_oracles() {
    Rng rng(8);
    int exact = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(400);
        auto y = oracle::random_labels(rng, n, 0.05 + 0.9 * rng.uniform01());
        y[0] = 0;
        y[1] = 1;
        std::vector<double> s(n);
        for (auto& v : s) v = static_cast<double>(rng.uniform_index(1 + n / 4)) / 3.0; // many ties
        exact += auroc(y, s) == oracle::pairwise_auroc(y, s);
    }
    const double a = logloss(std::vector<uint8_t>{1}, std::vector<double>{0.5});
    const double b = logloss(std::vector<uint8_t>{1, 0}, std::vector<double>{0.9, 0.2});
    const bool hand = std::abs(a - 0.693147) <= 1e-6 && std::abs(b - 0.164252) <= 1e-6;
    return verdict(exact == 200 && hand, "AUROC exact on " + std::to_string(exact) + "/200; logloss " +
                                             fmt("%.6f", a) + ", " + fmt("%.6f", b));
}

// ---- training

Dataset noisy(Rng& rng, std::size_t n) {
    std::vector<double> x1(n), x2(n);
    oracle::Categories c(n);
    std::vector<uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal();
        x2[i] = rng.uniform_index(7) == 0 ? std::nan("") : rng.normal();
        c[i] = "k" + std::to_string(rng.uniform_index(12));
        const double logit = x1[i] + (c[i] < "k5" ? 1.0 : -1.0);
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-logit)));
    }
    return Dataset({FeatureColumn::numerical("x1", x1), FeatureColumn::numerical("x2", x2),
                    oracle::cat_column("c", c)},
                   std::string("y"), y);
}

Verdict training_convergence() {
    Rng rng(13);
    int monotone = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = noisy(rng, 100 + rng.uniform_index(300));
        GBDTConfig cfg;
        cfg.n_trees = 30;
        cfg.early_stopping_rounds = 0;
        cfg.max_depth = 1 + static_cast<uint32_t>(rng.uniform_index(5));
        cfg.lambda = rng.uniform01() * 3;
        cfg.learning_rate = 0.05 + rng.uniform01() * 0.3;
        const auto curve = train(ds, nullptr, cfg).metadata.train_logloss;
        bool ok = true;
        for (std::size_t i = 1; i < curve.size(); ++i) ok = ok && curve[i] <= curve[i - 1] + 1e-12;
        monotone += ok;
    }

    std::vector<double> x(100);
    std::vector<uint8_t> ys(100);
    for (int i = 0; i < 100; ++i) {
        x[i] = i / 100.0;
        ys[i] = i >= 50;
    }
    const Dataset sep({FeatureColumn::numerical("x", x)}, std::string("y"), ys);
    GBDTConfig cfg;
    cfg.n_trees = 200;
    cfg.early_stopping_rounds = 0;
    cfg.min_child_weight = 0;
    const double sep_loss = logloss(ys, train(sep, nullptr, cfg).predict(sep));

    // XOR with the (0,1) row doubled; the 4-row table gives zero first-split gain.
    const std::vector<uint8_t> yx{0, 1, 1, 1, 0};
    const Dataset xr({FeatureColumn::numerical("a", {0, 0, 0, 1, 1}), FeatureColumn::numerical("b", {0, 1, 1, 0, 1})},
                     std::string("y"), yx);
    cfg.n_trees = 100;
    auto correct = [&](uint32_t depth) {
        cfg.max_depth = depth;
        const auto p = train(xr, nullptr, cfg).predict(xr);
        int c = 0;
        for (int i = 0; i < 5; ++i) c += (p[i] > 0.5) == (yx[i] == 1);
        return c;
    };
    const int deep = correct(2), shallow = correct(1);
    return verdict(monotone == 20 && sep_loss < 0.01 && deep == 5 && shallow < 5,
                   "monotone " + std::to_string(monotone) + "/20; separable loss " + fmt("%.2e", sep_loss) +
                       "; XOR depth 2 " + std::to_string(deep) + "/5, depth 1 " + std::to_string(shallow) + "/5");
}

// ---- benchmark behaviour

Verdict encoder_ordering() {
    int ok = 0;
    std::string rows;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        synth::LeakageSpec ls;
        ls.seed = seed;
        ExperimentSpec spec;
        spec.repeats = 1;
        spec.seed = seed;
        const auto table = run_ablation(spec, synth::make_leakage_hazard(ls),
                                        {EncoderMode::target, EncoderMode::kfold_target, EncoderMode::native_passthrough});
        const double te = table.results[0].auroc->mean;
        const double kf = table.results[1].auroc->mean;
        const double nat = table.results[2].auroc->mean;
        ok += nat >= kf && kf > te;
    }
    return verdict(ok >= 8, "native >= kfold_target > target on " + std::to_string(ok) + "/10 paired seeds");
}

Verdict movielens() {
    const char* path = std::getenv("CTRBOOST_MOVIELENS");
    if (path == nullptr || !*path) return {Outcome::skip, "set CTRBOOST_MOVIELENS to a prepared CSV to run"};
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.data = path;
    if (const char* schema = std::getenv("CTRBOOST_MOVIELENS_SCHEMA")) spec.schema = schema;
    if (const char* target = std::getenv("CTRBOOST_MOVIELENS_TARGET")) spec.target = target;
    spec.repeats = 10;
    spec.encoder.mode = EncoderMode::native_passthrough;
    const auto report = run_experiment(spec);
    const double secs = seconds_since(t0);
    const double mean = report.results[0].auroc ? report.results[0].auroc->mean : 0.0;
    return verdict(mean >= 0.93 && secs < 900.0,
                   "mean test AUROC " + fmt("%.4f", mean) + " over 10 repeats, " + fmt("%.0f", secs) + " s");
}

Verdict staleness_gap() {
    double total = 0.0, lowest = 1.0, worst_window = 1.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        synth::DriftSpec d;
        d.seed = seed;
        ExperimentSpec spec;
        spec.seed = seed;
        spec.staleness.time_column = "t";
        const auto report = simulate_staleness(spec, synth::make_drift_stream(d));
        std::map<uint32_t, double> never, every;
        for (const auto& p : report.staleness) {
            if (p.window < d.drift_window || !p.auroc) continue;
            (p.policy == RetrainPolicy::never ? never : every)[p.window] = *p.auroc;
        }
        double gap = 0.0;
        for (const auto& [w, auc] : every) {
            gap += auc - never.at(w);
            // The drift window itself is unseen by both policies.
            if (w > d.drift_window) worst_window = std::min(worst_window, auc - never.at(w));
        }
        gap /= static_cast<double>(every.size());
        total += gap;
        lowest = std::min(lowest, gap);
    }
    const double mean = total / 10.0;
    return verdict(mean >= 0.05, "post-drift AUROC gap every_window - never: mean " + fmt("%.4f", mean) +
                                     ", lowest seed " + fmt("%.4f", lowest) +
                                     ", lowest single window after the drift " + fmt("%.4f", worst_window) +
                                     " (10 seeds)");
}

Verdict determinism() {
    synth::CtrSpec cs;
    cs.n_rows = 3000;
    const auto ds = synth::make_ctr(cs);
    ExperimentSpec spec;
    spec.repeats = 3;
    spec.gbdt.n_trees = 60;
    const bool same = same_metrics(run_experiment(spec, ds), run_experiment(spec, ds));

    int parity = 0;
    const std::vector<EncoderMode> modes{EncoderMode::label, EncoderMode::target, EncoderMode::kfold_target,
                                         EncoderMode::ordered_ts, EncoderMode::native_passthrough};
    const auto path = fs::temp_directory_path() / "ctrboost_acceptance_model.ctbm";
    for (auto mode : modes) {
        ExperimentSpec s = spec;
        s.encoder.mode = mode;
        s.gbdt.early_stopping_rounds = 0;
        const Model m = train(ds, nullptr, s.learner(0), s.encoder_for(0));
        save_model(m, path);
        parity += m.predict(ds) == load_model(path).predict(ds);
    }
    fs::remove(path);
    return verdict(same && parity == 5, std::string("rerun metrics ") + (same ? "identical" : "differ") +
                                            "; save/load bit parity " + std::to_string(parity) + "/5 encoders");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"encoder-oracle-equivalence", encoder_oracles},
        {"leakage-invariance", leakage_invariance},
        {"split-finder-optimality", split_optimality},
        {"gradient-check", gradient_check},
        {"auroc-logloss-oracles", metric_oracles},
        {"monotone-loss-and-convergence", training_convergence},
        {"encoder-ablation-ordering", encoder_ordering},
        {"movielens-sanity-run", movielens},
        {"staleness-simulation", staleness_gap},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {Outcome::fail, std::string("error: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::fail;
        std::printf("%s %s: %s [%.1f s]\n", tag, name.c_str(), v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
