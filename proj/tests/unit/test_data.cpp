#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ctrboost/data.hpp"
#include "ctrboost/error.hpp"
#include "ctrboost/rng.hpp"
#include "oracles.hpp"

using namespace ctrboost;

namespace {

Dataset parse(const std::string& text, const std::string& hint = "", CsvOptions opts = {}) {
    std::istringstream in(text);
    std::istringstream hint_in(hint);
    return parse_csv(in, SchemaHint::parse(hint_in), opts);
}

ErrorCode error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal;
}

Dataset sequential(std::size_t n) {
    std::vector<double> ids(n);
    std::vector<uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = static_cast<double>(i);
        y[i] = i % 3 == 0;
    }
    return Dataset({FeatureColumn::numerical("id", ids)}, std::string("y"), y);
}

} // namespace

TEST(LoadCsv, ThreeRowFile) {
    const auto ds = parse("user,age,click\nu1,31,1\nu2,40,0\nu1,22,1\n",
                          "user = cat\nage = num\nclick = target\n");
    EXPECT_EQ(ds.n_rows(), 3u);
    ASSERT_EQ(ds.n_features(), 2u);
    EXPECT_EQ(ds.target_name(), "click");
    const auto& user = ds.feature(0);
    EXPECT_TRUE(user.is_categorical());
    EXPECT_EQ(user.meta.cardinality, 2u);
    EXPECT_EQ(user.codes, (std::vector<uint32_t>{0, 1, 0}));
    EXPECT_EQ(ds.feature(1).values, (std::vector<double>{31, 40, 22}));
    EXPECT_EQ(std::vector<uint8_t>(ds.target().begin(), ds.target().end()),
              (std::vector<uint8_t>{1, 0, 1}));
    const auto schema = ds.schema();
    ASSERT_EQ(schema.size(), 3u);
    EXPECT_EQ(schema[2].kind, ColumnKind::target);
}

TEST(LoadCsv, InfersKindsWhenNotHinted) {
    const auto ds = parse("a,b,y\n1.5,x,0\n,z,1\n2,x,TRUE\n", "y = target\n");
    EXPECT_FALSE(ds.feature(0).is_categorical());
    EXPECT_TRUE(std::isnan(ds.feature(0).values[1]));
    EXPECT_TRUE(ds.feature(1).is_categorical());
    EXPECT_EQ(ds.target()[2], 1);
}

TEST(LoadCsv, CardinalityMatchesOnePassCount) {
    Rng rng(11);
    std::ostringstream csv;
    csv << "item,y\n";
    std::set<std::string> distinct;
    bool any_missing = false;
    for (int i = 0; i < 1000; ++i) {
        std::string v = "cat" + std::to_string(rng.uniform_index(40));
        if (rng.uniform_index(50) == 0) {
            v.clear();
            any_missing = true;
        }
        if (!v.empty()) distinct.insert(v);
        csv << v << ',' << (i % 2) << '\n';
    }
    const auto ds = parse(csv.str(), "item = cat\ny = target\n");
    EXPECT_EQ(ds.feature(0).meta.cardinality, distinct.size() + (any_missing ? 1 : 0));
}

TEST(LoadCsv, MissingCategoryIsReserved) {
    const auto ds = parse("c,y\n,1\nb,0\n,0\n", "c = cat\ny = target\n");
    const auto& col = ds.feature(0);
    EXPECT_EQ(col.category(0), std::string(kMissingCategory));
    EXPECT_EQ(col.codes[0], col.codes[2]);
    EXPECT_EQ(col.meta.cardinality, 2u);
}

TEST(LoadCsv, QuotedFieldsAndCrlf) {
    const auto ds = parse("name,y\r\n\"a,b\",1\r\n\"say \"\"hi\"\"\",0\r\n", "name = cat\ny = target\n");
    EXPECT_EQ(ds.feature(0).category(0), "a,b");
    EXPECT_EQ(ds.feature(0).category(1), "say \"hi\"");
}

TEST(LoadCsv, CustomDelimiter) {
    CsvOptions opts;
    opts.delimiter = '\t';
    const auto ds = parse("a\ty\nx\t1\n", "y = target\n", opts);
    EXPECT_EQ(ds.n_rows(), 1u);
}

TEST(LoadCsv, RoundTripOfRawStrings) {
    Rng rng(3);
    std::vector<std::string> raw;
    std::ostringstream csv;
    csv << "c,y\n";
    for (int i = 0; i < 200; ++i) {
        raw.push_back("v" + std::to_string(rng.uniform_index(17)));
        csv << raw.back() << ",0\n";
    }
    const auto ds = parse(csv.str(), "c = cat\ny = target\n");
    for (std::size_t r = 0; r < raw.size(); ++r) EXPECT_EQ(ds.feature(0).category(r), raw[r]);
}

TEST(LoadCsv, Errors) {
    EXPECT_EQ(error_of([] { (void)load_csv("/nonexistent/file.csv"); }), ErrorCode::io);
    EXPECT_EQ(error_of([] { (void)parse("a,a,y\n1,2,0\n", "y = target\n"); }), ErrorCode::schema);
    EXPECT_EQ(error_of([] { (void)parse("a,,y\n1,2,0\n", "y = target\n"); }), ErrorCode::schema);
    EXPECT_EQ(error_of([] { (void)parse("a,y\n1,2\n", "y = target\n"); }), ErrorCode::parse);
    EXPECT_EQ(error_of([] { (void)parse("a,y\n1,yes\n", "y = target\n"); }), ErrorCode::parse);
    EXPECT_EQ(error_of([] { (void)parse("a,y\n1,0\n", ""); }), ErrorCode::schema);
    EXPECT_EQ(error_of([] { (void)parse("a,y\n1,0\n", "zz = target\n"); }), ErrorCode::schema);
    EXPECT_EQ(error_of([] { (void)parse("a,y\nfoo,1\n", "a = num\ny = target\n"); }), ErrorCode::parse);
    EXPECT_EQ(error_of([] { (void)parse("a,y\n1,0,3\n", "y = target\n"); }), ErrorCode::parse);
}

TEST(LoadCsv, TargetParsing) {
    EXPECT_EQ(parse_target_value("0"), 0);
    EXPECT_EQ(parse_target_value("1"), 1);
    EXPECT_EQ(parse_target_value("True"), 1);
    EXPECT_EQ(parse_target_value("FALSE"), 0);
    EXPECT_FALSE(parse_target_value("2"));
    EXPECT_FALSE(parse_target_value("1.0"));
    EXPECT_FALSE(parse_target_value(""));
}

TEST(LoadCsv, ScoringInputWithoutTarget) {
    CsvOptions opts;
    opts.require_target = false;
    const auto ds = parse("a,b\n1,x\n", "", opts);
    EXPECT_FALSE(ds.has_target());
    EXPECT_EQ(ds.n_rows(), 1u);
}

TEST(SchemaHintFile, ParsesKinds) {
    std::istringstream in("# comment\nuser = cat\nage=numeric\n  click = label \nx = ignore\n");
    const auto hint = SchemaHint::parse(in);
    EXPECT_EQ(hint.kinds.at("user"), HintKind::categorical);
    EXPECT_EQ(hint.kinds.at("age"), HintKind::numerical);
    EXPECT_EQ(hint.kinds.at("click"), HintKind::target);
    EXPECT_EQ(hint.kinds.at("x"), HintKind::ignore);
    std::istringstream bad("user = colour\n");
    EXPECT_THROW(SchemaHint::parse(bad), Error);
}

TEST(LoadCsv, IgnoredColumnDropped) {
    const auto ds = parse("id,a,y\n7,1,0\n", "id = ignore\ny = target\n");
    EXPECT_EQ(ds.n_features(), 1u);
    EXPECT_FALSE(ds.find_feature("id"));
}

TEST(Split, ExactSizes) {
    const auto a = split_indices(100, {0.8, 0.1, 0.1, 7});
    EXPECT_EQ(a.train.size(), 80u);
    EXPECT_EQ(a.valid.size(), 10u);
    EXPECT_EQ(a.test.size(), 10u);
    const auto b = split_indices(103, {0.8, 0.1, 0.1, 7});
    EXPECT_EQ(b.train.size(), 83u);
    EXPECT_EQ(b.valid.size(), 10u);
    EXPECT_EQ(b.test.size(), 10u);
}

TEST(Split, DeterministicPerSeed) {
    const auto a = split_indices(500, {0.8, 0.1, 0.1, 1});
    const auto b = split_indices(500, {0.8, 0.1, 0.1, 1});
    const auto c = split_indices(500, {0.8, 0.1, 0.1, 2});
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.test, c.test);
}

TEST(Split, DisjointAndCoveringProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10 + rng.uniform_index(500);
        const auto ds = sequential(n);
        const auto parts = split(ds, {0.7, 0.2, 0.1, rng.next()});
        const auto all = parts.train.concat(parts.valid).concat(parts.test);
        ASSERT_EQ(all.n_rows(), n);
        std::vector<double> ids = all.feature(0).values;
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(ids[i], static_cast<double>(i));
        // targets travel with their rows
        for (std::size_t r = 0; r < n; ++r) {
            const auto id = static_cast<std::size_t>(all.feature(0).values[r]);
            ASSERT_EQ(all.target()[r], id % 3 == 0);
        }
    }
}

TEST(Split, Errors) {
    EXPECT_THROW(split_indices(9, {0.8, 0.1, 0.1, 0}), Error);
    EXPECT_THROW(split_indices(100, {0.8, 0.1, 0.2, 0}), Error);
    EXPECT_THROW(split_indices(100, {0.9, 0.1, 0.0, 0}), Error);
    EXPECT_THROW(split_indices(10, {0.95, 0.04, 0.01, 0}), Error);
}

TEST(Subsample, SizesAndIdentity) {
    const auto ds = sequential(1000);
    EXPECT_EQ(subsample(ds, 0.1, 3).n_rows(), 100u);
    const auto full = subsample(ds, 1.0, 3);
    std::multiset<double> a(ds.feature(0).values.begin(), ds.feature(0).values.end());
    std::multiset<double> b(full.feature(0).values.begin(), full.feature(0).values.end());
    EXPECT_EQ(a, b);
    EXPECT_THROW(subsample(ds, 0.0, 1), Error);
    EXPECT_THROW(subsample(ds, 1.5, 1), Error);
    EXPECT_THROW(subsample(sequential(5), 0.1, 1), Error);
}

TEST(Subsample, ClassRateStaysCloseMonteCarlo) {
    Rng rng(99);
    const std::size_t n = 10000;
    std::vector<double> x(n);
    std::vector<uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.bernoulli(0.3);
    const Dataset ds({FeatureColumn::numerical("x", x)}, std::string("y"), y);
    const double parent = oracle::mean(y);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = subsample(ds, 0.1, seed);
        const oracle::Labels sy(s.target().begin(), s.target().end());
        EXPECT_LT(std::abs(oracle::mean(sy) - parent), 0.05) << "seed " << seed;
    }
}

TEST(Subsample, PreservesDictionaries) {
    const auto col = oracle::cat_column("c", {"a", "b", "c", "a", "b", "c", "a", "b", "c", "a"});
    const Dataset ds({col}, std::string("y"), std::vector<uint8_t>(10, 0));
    const auto s = subsample(ds, 0.5, 1);
    EXPECT_EQ(s.feature(0).dictionary, ds.feature(0).dictionary);
}

TEST(Dataset, ValidatesInvariants) {
    EXPECT_THROW(Dataset({FeatureColumn::numerical("a", {1, 2})}, std::string("y"), {0}), Error);
    EXPECT_THROW(Dataset({FeatureColumn::numerical("a", {1})}, std::string("y"), {2}), Error);
    auto dict = std::make_shared<Dictionary>(Dictionary{"x"});
    EXPECT_THROW(Dataset({FeatureColumn::categorical("c", {1}, dict)}, std::string("y"), {0}), Error);
    EXPECT_THROW(Dataset({FeatureColumn::numerical("a", {1}), FeatureColumn::numerical("a", {1})},
                         std::string("y"), {0}),
                 Error);
}

TEST(Dataset, DeterministicOperations) {
    const auto ds = sequential(300);
    const auto a = split(ds, {0.8, 0.1, 0.1, 4});
    const auto b = split(ds, {0.8, 0.1, 0.1, 4});
    EXPECT_EQ(a.test.feature(0).values, b.test.feature(0).values);
    EXPECT_EQ(subsample(ds, 0.3, 8).feature(0).values, subsample(ds, 0.3, 8).feature(0).values);
}

TEST(RemapCodes, MatchesByString) {
    const auto ref = oracle::cat_column("c", {"a", "b"});
    const auto other = oracle::cat_column("c", {"b", "z", "a"});
    const auto codes = remap_codes(other, *ref.dictionary);
    EXPECT_EQ(codes, (std::vector<uint32_t>{1, kUnseenCode, 0}));
}
