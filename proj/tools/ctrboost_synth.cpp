// Writes the synthetic benchmark datasets to CSV.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ctrboost/error.hpp"
#include "ctrboost/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ctrboost_synth: synthetic CTR-style datasets"};
    std::string kind = "ctr";
    std::string out;
    uint64_t seed = 0;
    std::size_t rows = 0;
    app.add_option("--kind", kind, "ctr | leakage | drift | stationary")
        ->check(CLI::IsMember({"ctr", "leakage", "drift", "stationary"}));
    app.add_option("--out", out, "CSV output path")->required();
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--rows", rows, "rows (ctr, leakage) or rows per window (drift, stationary)");
    CLI11_PARSE(app, argc, argv);

    using namespace ctrboost::synth;
    try {
        if (kind == "ctr") {
            CtrSpec spec;
            spec.seed = seed;
            if (rows) spec.n_rows = rows;
            write_csv(make_ctr(spec), out);
        } else if (kind == "leakage") {
            LeakageSpec spec;
            spec.seed = seed;
            if (rows) spec.n_rows = rows;
            write_csv(make_leakage_hazard(spec), out);
        } else {
            DriftSpec spec;
            spec.seed = seed;
            spec.stationary = kind == "stationary";
            if (rows) spec.rows_per_window = rows;
            write_csv(make_drift_stream(spec), out);
        }
    } catch (const ctrboost::Error& e) {
        std::cerr << "ctrboost_synth: " << e.what() << '\n';
        return static_cast<int>(e.code());
    }
    return 0;
}
