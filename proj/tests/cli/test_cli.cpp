// Drives the ctrboost executable and checks it against the golden files and
// the C library.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ctrboost/c_api.h"

namespace fs = std::filesystem;

namespace {

const fs::path kData = CTRBOOST_TEST_DATA_DIR;
const std::string kCli = CTRBOOST_CLI_PATH;

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("ctrboost_cli_" + name); }

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

Run run(const std::string& args) {
    const auto out = temp_path("stdout.txt");
    const auto err = temp_path("stderr.txt");
    const std::string cmd = "'" + kCli + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string data_args() {
    return "--data '" + (kData / "golden.csv").string() + "' --schema '" + (kData / "golden.schema").string() + "'";
}

std::vector<double> read_preds(const fs::path& p) {
    size_t n = 0;
    ctb_read_predictions(p.c_str(), nullptr, 0, &n);
    std::vector<double> v(n);
    EXPECT_EQ(ctb_read_predictions(p.c_str(), v.data(), v.size(), &n), CTB_OK) << ctb_last_error();
    return v;
}

} // namespace

TEST(Cli, VersionAndUsageErrors) {
    const auto v = run("--version");
    EXPECT_EQ(v.status, 0);
    EXPECT_NE(v.out.find("ctrboost "), std::string::npos);
    EXPECT_NE(run("").status, 0);
    EXPECT_NE(run("train --data x.csv").status, 0); // --out missing
}

TEST(Cli, RetrainingReproducesGoldenModelBytes) {
    for (const std::string enc : {"native", "kfold_target"}) {
        const auto model = temp_path("retrain_" + enc + ".ctbm");
        const auto r = run("train " + data_args() + " --encoder " + enc +
                           " --seed 5 --set gbdt.n_trees=25 --set gbdt.max_depth=4 --out '" + model.string() + "'");
        ASSERT_EQ(r.status, 0) << r.err;
        EXPECT_NE(r.err.find("early stopping disabled"), std::string::npos);
        EXPECT_EQ(slurp(model), slurp(kData / ("golden_" + enc + ".ctbm"))) << enc;
        fs::remove(model);
    }
}

TEST(Cli, PredictMatchesGoldenAndLibrary) {
    for (const std::string enc : {"native", "kfold_target"}) {
        const auto golden_model = kData / ("golden_" + enc + ".ctbm");
        const auto preds = temp_path("pred_" + enc + ".csv");
        const auto r = run("predict " + data_args() + " --model '" + golden_model.string() + "' --out '" +
                           preds.string() + "'");
        ASSERT_EQ(r.status, 0) << r.err;
        EXPECT_EQ(slurp(preds), slurp(kData / ("golden_" + enc + "_pred.csv")));

        ctb_dataset* ds = nullptr;
        ASSERT_EQ(ctb_dataset_load_csv((kData / "golden.csv").c_str(), (kData / "golden.schema").c_str(), nullptr,
                                       0, &ds),
                  CTB_OK)
            << ctb_last_error();
        ctb_model* m = nullptr;
        ASSERT_EQ(ctb_model_load(golden_model.c_str(), &m), CTB_OK) << ctb_last_error();
        const auto cli = read_preds(preds);
        std::vector<double> lib(cli.size());
        ASSERT_EQ(ctb_predict(m, ds, lib.data(), lib.size()), CTB_OK) << ctb_last_error();
        for (std::size_t i = 0; i < cli.size(); ++i) ASSERT_NEAR(cli[i], lib[i], 1e-9) << i;
        ctb_model_free(m);
        ctb_dataset_free(ds);
        fs::remove(preds);
    }
}

TEST(Cli, EvaluateModelAndPredictionFilesAgree) {
    const auto a = run("evaluate " + data_args() + " --model '" + (kData / "golden_native.ctbm").string() + "'");
    const auto b =
        run("evaluate " + data_args() + " --predictions '" + (kData / "golden_native_pred.csv").string() + "'");
    ASSERT_EQ(a.status, 0) << a.err;
    ASSERT_EQ(b.status, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("\"auroc\""), std::string::npos);
    const auto both = run("evaluate " + data_args() + " --model m --predictions p");
    EXPECT_NE(both.status, 0);
}

TEST(Cli, ErrorsCarryStatusCodes) {
    const auto missing = run("predict " + data_args() + " --model '" + temp_path("absent.ctbm").string() +
                             "' --out '" + temp_path("x.csv").string() + "'");
    EXPECT_EQ(missing.status, CTB_ERR_IO);
    EXPECT_NE(missing.err.find("ctrboost: error (io)"), std::string::npos) << missing.err;

    const auto corrupt = temp_path("corrupt.ctbm");
    std::string bytes = slurp(kData / "golden_native.ctbm");
    bytes[bytes.size() / 2] ^= 1;
    std::ofstream(corrupt, std::ios::binary) << bytes;
    const auto r = run("predict " + data_args() + " --model '" + corrupt.string() + "' --out '" +
                       temp_path("x.csv").string() + "'");
    EXPECT_EQ(r.status, CTB_ERR_CHECKSUM) << r.err;
    fs::remove(corrupt);

    const auto bad_key = run("train " + data_args() + " --set gbdt.n_tress=3 --out '" + temp_path("m").string() + "'");
    EXPECT_EQ(bad_key.status, CTB_ERR_PARSE) << bad_key.err;
}

TEST(Cli, ExperimentReportRerunsToSameMetrics) {
    const auto report = temp_path("exp.json");
    const auto r = run("experiment " + data_args() +
                       " --repeats 2 --set gbdt.n_trees=20 --format json --out '" + report.string() + "'");
    ASSERT_EQ(r.status, 0) << r.err;
    const auto again = run("report --in '" + report.string() + "' --rerun");
    EXPECT_EQ(again.status, 0) << again.err << again.out;

    const auto csv = temp_path("ablate.csv");
    const auto t = run("ablate " + data_args() + " --repeats 2 --modes label,native --set gbdt.n_trees=20 --format csv --out '" +
                       csv.string() + "'");
    ASSERT_EQ(t.status, 0) << t.err;
    std::istringstream rows(slurp(csv));
    std::string line;
    std::getline(rows, line);
    EXPECT_EQ(line, "mode,logloss_mean,logloss_hw,auroc_mean,auroc_hw");
    fs::remove(report);
    fs::remove(csv);
}
