// Engine called directly versus through the shared library: same bits.

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "ctrboost/c_api.h"
#include "ctrboost/gbdt.hpp"
#include "ctrboost/synthetic.hpp"

using namespace ctrboost;

namespace {

/// Rebuilds an engine dataset as a C handle.
ctb_dataset* to_handle(const Dataset& ds) {
    std::vector<ctb_column> cols;
    std::vector<std::vector<int32_t>> codes;
    std::vector<std::vector<const char*>> cats;
    codes.reserve(ds.n_features());
    cats.reserve(ds.n_features());
    for (const auto& f : ds.features()) {
        ctb_column c{};
        c.name = f.meta.name.c_str();
        if (f.is_categorical()) {
            c.kind = CTB_COLUMN_CATEGORICAL;
            codes.emplace_back(f.codes.begin(), f.codes.end());
            auto& names = cats.emplace_back();
            for (const auto& s : *f.dictionary) names.push_back(s.c_str());
            c.codes = codes.back().data();
            c.categories = names.data();
            c.n_categories = names.size();
        } else {
            c.kind = CTB_COLUMN_NUMERICAL;
            c.values = f.values.data();
        }
        cols.push_back(c);
    }
    const auto y = ds.target();
    ctb_dataset* out = nullptr;
    EXPECT_EQ(ctb_dataset_from_columns(cols.data(), cols.size(), ds.n_rows(), y.data(),
                                       ds.target_name().c_str(), &out),
              CTB_OK)
        << ctb_last_error();
    return out;
}

} // namespace

TEST(Parity, EngineAndLibraryPredictIdentically) {
    synth::CtrSpec s;
    s.n_rows = 3000;
    s.n_categorical = 4;
    s.cardinality = 40;
    const auto ds = synth::make_ctr(s);
    ctb_dataset* h = to_handle(ds);
    for (auto mode : {EncoderMode::label, EncoderMode::target, EncoderMode::kfold_target,
                      EncoderMode::ordered_ts, EncoderMode::native_passthrough}) {
        GBDTConfig cfg;
        cfg.n_trees = 40;
        cfg.early_stopping_rounds = 0;
        cfg.seed = 21;
        cfg.cat_mode = mode == EncoderMode::native_passthrough ? CategoricalMode::native
                                                               : CategoricalMode::encoded;
        EncoderSpec enc;
        enc.mode = mode;
        enc.seed = 21;
        const auto expected = train(ds, nullptr, cfg, enc).predict(ds);

        const std::string name(to_string(mode));
        const char* keys[] = {"n_trees", "seed", "encoder"};
        const char* values[] = {"40", "21", name.c_str()};
        ctb_model* m = nullptr;
        ASSERT_EQ(ctb_train(h, nullptr, keys, values, 3, &m), CTB_OK) << ctb_last_error();
        std::vector<double> got(ds.n_rows());
        ASSERT_EQ(ctb_predict(m, h, got.data(), got.size()), CTB_OK);
        EXPECT_EQ(got, expected) << name;
        ctb_model_free(m);
    }
    ctb_dataset_free(h);
}
