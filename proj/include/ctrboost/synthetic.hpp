#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "ctrboost/data.hpp"

namespace ctrboost::synth {

/// CTR-like table: `n_categorical` columns ("c0".."c{k-1}") with Zipf-like
/// popularity and a latent click effect per category, one pairwise
/// interaction between c0 and c1, and `n_numerical` noisy numeric columns.
struct CtrSpec {
    std::size_t n_rows = 10000;
    std::size_t n_categorical = 10;
    std::size_t cardinality = 200;
    std::size_t n_numerical = 2;
    double base_rate = 0.25;
    uint64_t seed = 0;
};
Dataset make_ctr(const CtrSpec& spec);

/// One high-cardinality "id" column next to an 8-valued "context" column
/// and a numeric "x". Half the rows come from a few frequent "head" ids whose
/// click effect flips sign with the context group (contexts 0-3 vs 4-7); the
/// rest come from a large pool of rare "tail" ids with a plain effect. The
/// head interaction is only visible to splits below a context split; the
/// tail makes training-set target statistics memorize the row's own label.
struct LeakageSpec {
    std::size_t n_rows = 20000;
    std::size_t n_head_ids = 200;
    std::size_t n_tail_ids = 2500;
    double tail_share = 0.5;
    double head_effect_sd = 0.2;    // marginal head-id effect
    double interaction_sd = 2.0;    // head-id effect times the context sign
    double tail_effect_sd = 1.0;
    double context_effect = 1.0;    // main effect of the context group
    uint64_t seed = 0;
};
Dataset make_leakage_hazard(const LeakageSpec& spec);

/// Time-ordered event stream with a numeric "t" column. Each event has a
/// "user" segment, an "item" drawn from the live item pool, and a context
/// value. Before `drift_window` the item pool is fixed; from it on, every
/// window brings a fresh pool and items live for two windows. With
/// `stationary` the pool never changes.
struct DriftSpec {
    std::size_t n_windows = 10;
    std::size_t rows_per_window = 2000;
    std::size_t drift_window = 4;
    std::size_t pool_size = 150;
    double item_effect_sd = 1.5;
    bool stationary = false;
    uint64_t seed = 0;
};
Dataset make_drift_stream(const DriftSpec& spec);

/// Writes `ds` as CSV with a header; categorical cells are raw strings and
/// the target column comes last.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

} // namespace ctrboost::synth
