#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>

#include "ctrboost/data.hpp"
#include "ctrboost/error.hpp"
#include "ctrboost/synthetic.hpp"

using namespace ctrboost;
namespace fs = std::filesystem;

namespace {

bool same_data(const Dataset& a, const Dataset& b) {
    if (a.n_rows() != b.n_rows() || a.n_features() != b.n_features()) return false;
    for (std::size_t j = 0; j < a.n_features(); ++j) {
        const auto& x = a.feature(j);
        const auto& y = b.feature(j);
        if (x.meta.name != y.meta.name || x.is_categorical() != y.is_categorical()) return false;
        for (std::size_t r = 0; r < a.n_rows(); ++r) {
            if (x.is_categorical() ? x.category(r) != y.category(r) : x.values[r] != y.values[r]) {
                return false;
            }
        }
    }
    return std::equal(a.target().begin(), a.target().end(), b.target().begin());
}

} // namespace

TEST(Synthetic, CtrShapeAndDeterminism) {
    synth::CtrSpec spec;
    spec.n_rows = 2000;
    spec.seed = 3;
    const auto a = synth::make_ctr(spec);
    EXPECT_EQ(a.n_rows(), 2000u);
    EXPECT_EQ(a.n_features(), spec.n_categorical + spec.n_numerical);
    EXPECT_EQ(a.target_name(), "click");
    for (std::size_t j = 0; j < spec.n_categorical; ++j) {
        EXPECT_TRUE(a.feature(j).is_categorical());
        EXPECT_LE(a.feature(j).dictionary->size(), spec.cardinality);
    }
    EXPECT_TRUE(same_data(a, synth::make_ctr(spec)));
    spec.seed = 4;
    EXPECT_FALSE(same_data(a, synth::make_ctr(spec)));
}

TEST(Synthetic, CtrPopularityIsSkewed) {
    synth::CtrSpec spec;
    spec.n_rows = 5000;
    const auto ds = synth::make_ctr(spec);
    const auto& c0 = ds.feature(0);
    std::vector<std::size_t> counts(c0.dictionary->size());
    for (auto code : c0.codes) ++counts[code];
    std::sort(counts.rbegin(), counts.rend());
    // Zipf head: the top category carries far more than a uniform share.
    EXPECT_GT(counts[0], 10 * ds.n_rows() / spec.cardinality);
}

TEST(Synthetic, LeakageHazardLayout) {
    synth::LeakageSpec spec;
    spec.n_rows = 4000;
    const auto ds = synth::make_leakage_hazard(spec);
    ASSERT_EQ(ds.n_features(), 3u);
    EXPECT_EQ(ds.feature(0).meta.name, "id");
    EXPECT_EQ(ds.feature(1).dictionary->size(), 8u);
    std::size_t tail = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) tail += ds.feature(0).category(r)[0] == 't';
    EXPECT_NEAR(static_cast<double>(tail) / ds.n_rows(), spec.tail_share, 0.05);
    // Many tail ids with few rows each.
    EXPECT_GT(ds.feature(0).dictionary->size(), 1000u);
}

TEST(Synthetic, DriftStreamTurnsOverItems) {
    synth::DriftSpec spec;
    spec.rows_per_window = 500;
    const auto ds = synth::make_drift_stream(spec);
    ASSERT_EQ(ds.n_rows(), spec.n_windows * spec.rows_per_window);
    const auto t = *ds.find_feature("t");
    const auto item = *ds.find_feature("item");
    for (std::size_t r = 1; r < ds.n_rows(); ++r) {
        EXPECT_LE(ds.feature(t).values[r - 1], ds.feature(t).values[r]);
    }
    std::set<std::string> before, after;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const std::size_t w = r / spec.rows_per_window;
        (w < spec.drift_window ? before : after).insert(ds.feature(item).category(r));
    }
    for (const auto& s : after) EXPECT_EQ(before.count(s), 0u) << s;
}

TEST(Synthetic, StationaryStreamKeepsItems) {
    synth::DriftSpec spec;
    spec.rows_per_window = 500;
    spec.stationary = true;
    const auto ds = synth::make_drift_stream(spec);
    const auto& item = ds.feature(*ds.find_feature("item"));
    EXPECT_LE(item.dictionary->size(), spec.pool_size);
}

TEST(Synthetic, CsvRoundTrip) {
    synth::CtrSpec spec;
    spec.n_rows = 300;
    spec.n_categorical = 3;
    const auto ds = synth::make_ctr(spec);
    const fs::path path = fs::temp_directory_path() / "ctrboost_synth_roundtrip.csv";
    synth::write_csv(ds, path);
    CsvOptions options;
    options.target = "click";
    SchemaHint hint;
    for (std::size_t j = 0; j < spec.n_categorical; ++j) {
        hint.kinds["c" + std::to_string(j)] = HintKind::categorical;
    }
    const auto back = load_csv(path, hint, options);
    EXPECT_TRUE(same_data(ds, back));
    fs::remove(path);
}

TEST(Synthetic, RejectsBadSpecs) {
    synth::DriftSpec d;
    d.drift_window = d.n_windows;
    EXPECT_THROW(synth::make_drift_stream(d), Error);
    synth::LeakageSpec l;
    l.tail_share = 1.5;
    EXPECT_THROW(synth::make_leakage_hazard(l), Error);
}
