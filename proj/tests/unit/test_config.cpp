#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ctrboost/config.hpp"
#include "ctrboost/error.hpp"

using namespace ctrboost;

TEST(KeyValue, ParseAndRender) {
    std::istringstream in("# header\nversion = 1\n\n seed=42  # trailing\nname = a b\n");
    auto kv = KeyValueFile::parse(in);
    EXPECT_EQ(kv.get("version"), "1");
    EXPECT_EQ(kv.get("seed"), "42");
    EXPECT_EQ(kv.get("name"), "a b");
    EXPECT_FALSE(kv.contains("missing"));
    kv.set("seed", "7");
    kv.set("extra", "x");
    std::istringstream again(kv.to_string());
    const auto back = KeyValueFile::parse(again);
    EXPECT_EQ(back.entries(), kv.entries());
}

TEST(KeyValue, Errors) {
    std::istringstream dup("a = 1\na = 2\n");
    EXPECT_THROW(KeyValueFile::parse(dup), Error);
    std::istringstream noeq("just text\n");
    EXPECT_THROW(KeyValueFile::parse(noeq), Error);
    EXPECT_THROW(KeyValueFile::read("/nonexistent/spec.cfg"), Error);
}

TEST(Scalars, StrictParsing) {
    EXPECT_EQ(parse_double("0.25", "k"), 0.25);
    EXPECT_EQ(parse_uint("12", "k"), 12u);
    EXPECT_TRUE(parse_bool("true", "k"));
    EXPECT_FALSE(parse_bool("0", "k"));
    EXPECT_THROW(parse_double("0.25x", "k"), Error);
    EXPECT_THROW(parse_uint("-1", "k"), Error);
    EXPECT_THROW(parse_uint("", "k"), Error);
    EXPECT_THROW(parse_bool("maybe", "k"), Error);
}

TEST(Scalars, FormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0}) {
        EXPECT_EQ(parse_double(format_double(v), "k"), v);
    }
    EXPECT_EQ(split_list("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(trim("  x \t"), "x");
}
