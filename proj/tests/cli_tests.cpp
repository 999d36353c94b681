#include <gtest/gtest.h>

#include <cmath>

#include "cgems/dataset.hpp"
#include "cgems/rng.hpp"
#include "support.hpp"

using cgems_test::run_command;
using cgems_test::slurp;
using cgems_test::TempDir;
using cgems_test::write_file;
using nlohmann::json;

namespace {

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

cgems_test::CommandResult cli(const std::string& args) { return run_command(std::string("'") + CGEMS_CLI + "' " + args); }

std::filesystem::path demo_manifest() { return cgems_test::source_dir() / "corpus" / "demo" / "manifest.json"; }

// 84 labelled rows, 42 per class; only "Comments" separates them.
void write_separable_csv(const std::filesystem::path& p, std::uint64_t seed) {
    cgems::Rng rng(seed);
    std::vector<cgems::data::FeatureRecord> records;
    for (int i = 0; i < 84; ++i) {
        cgems::data::FeatureRecord r;
        r.program = "p" + std::to_string(i);
        for (std::size_t j = 0; j < 15; ++j)
            r.features[j] = rng.normal();
        r.label = i % 2;
        r.features[static_cast<std::size_t>(cgems::data::Feature::comments)] += i % 2 ? 3.0 : -3.0;
        records.push_back(r);
    }
    cgems::data::write_csv(p, records);
}

}  // namespace

TEST(cli, usage_errors_exit_2) {
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("analyze").code, 2);
    EXPECT_EQ(cli("frobnicate x").code, 2);
    EXPECT_EQ(cli("train x.csv --bogus -o m.json").code, 2);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(cli, analyze_empty_file_is_zeroed) {
    TempDir d;
    write_file(d / "empty.py", "");
    auto r = cli("analyze " + quote(d / "empty.py"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["schema"], "cgems.analyze/1");
    EXPECT_EQ(j["metrics"]["LOC"], 0);
    EXPECT_EQ(j["metrics"]["SLOC"], 0);
    EXPECT_EQ(j["metrics"]["Effort"], 0.0);
    EXPECT_EQ(j["metrics"]["Maintainability Index"], 100.0);
    EXPECT_TRUE(j["lexical_error"].is_null());
    EXPECT_TRUE(j.contains("run_info"));
}

TEST(cli, analyze_matches_fixture_oracle) {
    const auto fixtures = cgems_test::load_json(cgems_test::fixture("metric_oracles.json"))["fixtures"];
    TempDir d;
    for (const auto& f : fixtures) {
        if (f["name"] != "factorial" && f["name"] != "class_counter")
            continue;
        write_file(d / "sample.py", f["generated"].get<std::string>());
        auto r = cli("analyze " + quote(d / "sample.py"));
        ASSERT_EQ(r.code, 0) << r.err;
        auto j = json::parse(r.out);
        for (const auto& key : {"loc", "lloc", "sloc", "comments", "multi", "blank"})
            EXPECT_EQ(j["raw"][key], f["raw"][key]) << f["name"] << " " << key;
        for (const auto& key : {"n1", "n2", "N1", "N2"})
            EXPECT_EQ(j["halstead"][key], f["halstead"][key]) << f["name"] << " " << key;
        EXPECT_NEAR(j["halstead"]["volume"].get<double>(), f["halstead"]["volume"].get<double>(), 1e-9);
        EXPECT_NEAR(j["mi"].get<double>(), f["mi"].get<double>(), 1e-9);
        EXPECT_EQ(j["cyclomatic"]["total"], f["cyclomatic"]["total"]);
    }
}

TEST(cli, analyze_missing_file) {
    auto r = cli("analyze /nonexistent/file.py");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("does not exist"), std::string::npos);
}

TEST(cli, analyze_lexical_error_reports_partial_metrics) {
    TempDir d;
    write_file(d / "bad.py", "x = 1\ns = 'unterminated\n");
    auto r = cli("analyze " + quote(d / "bad.py"));
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_FALSE(j["lexical_error"].is_null());
    EXPECT_EQ(j["metrics"]["LOC"], 2);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(cli, analyze_writes_run_info_next_to_output) {
    TempDir d;
    write_file(d / "a.py", "a = b + c\n");
    auto r = cli("analyze " + quote(d / "a.py") + " -o " + quote(d / "out" / "a.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = cgems_test::load_json(d / "out" / "a.json");
    EXPECT_NEAR(j["halstead"]["difficulty"].get<double>(), 1.0, 1e-12);
    auto info = cgems_test::load_json(d / "out" / "a.json.run.json");
    EXPECT_EQ(info["schema"], "cgems.run/1");
    EXPECT_EQ(info["command"], "analyze");
    EXPECT_TRUE(info.contains("seed"));
    EXPECT_TRUE(info.contains("config_hash"));
    EXPECT_TRUE(info["versions"].contains("cgems"));
}

TEST(cli, compare_identical_files) {
    TempDir d;
    write_file(d / "g.py", "def add(a, b):\n    return a + b\n\nprint(add(1, 2))\n");
    auto r = cli("compare " + quote(d / "g.py") + " " + quote(d / "g.py") + " --corrected " + quote(d / "g.py"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto f = json::parse(r.out)["features"];
    EXPECT_EQ(f["Sequence Ratio"], 1.0);
    EXPECT_EQ(f["Edits"], 0);
    EXPECT_EQ(f["Cosine Similarity"], 0.0);
    EXPECT_EQ(f["Soft Cosine Similarity"], 0.0);
    EXPECT_NEAR(f["BLEU"].get<double>(), 100.0, 1e-9);
    EXPECT_NEAR(f["ROUGE-L F1"].get<double>(), 100.0, 1e-9);
}

TEST(cli, compare_without_corrected_omits_edits) {
    TempDir d;
    write_file(d / "g.py", "print(1)\n");
    write_file(d / "r.py", "print(2)\n");
    auto r = cli("compare " + quote(d / "g.py") + " " + quote(d / "r.py"));
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_FALSE(j["features"].contains("Edits"));
    EXPECT_TRUE(j["corrected"].is_null());
    EXPECT_NE(r.err.find("Edits omitted"), std::string::npos);
    EXPECT_EQ(cli("compare " + quote(d / "g.py") + " " + quote(d / "missing.py")).code, 2);
}

TEST(cli, collect_static_only_is_reproducible) {
    TempDir d;
    auto a = cli("collect " + quote(demo_manifest()) + " --static-only -o " + quote(d / "a.csv"));
    ASSERT_EQ(a.code, 0) << a.err;
    auto b = cli("collect " + quote(demo_manifest()) + " --static-only -j 4 -o " + quote(d / "b.csv"));
    ASSERT_EQ(b.code, 0) << b.err;
    const std::string csv = slurp(d / "a.csv");
    EXPECT_EQ(csv, slurp(d / "b.csv"));
    const std::string header = csv.substr(0, csv.find('\n'));
    EXPECT_EQ(header.substr(0, 8), "Program,");
    for (const auto& name : cgems::data::feature_names())
        EXPECT_NE(header.find(name), std::string::npos) << name;
    auto records = cgems::data::read_csv(d / "a.csv");
    EXPECT_GE(records.size(), 10u);
    auto info = cgems_test::load_json(d / "a.csv.run.json");
    EXPECT_EQ(info["runner"], "none");
}

TEST(cli, collect_bad_manifest) {
    TempDir d;
    write_file(d / "m.json", "[{\"id\": ");
    EXPECT_EQ(cli("collect " + quote(d / "m.json") + " -o " + quote(d / "x.csv")).code, 2);
    EXPECT_EQ(cli("collect " + quote(d / "none.json") + " -o " + quote(d / "x.csv")).code, 2);
}

TEST(cli, collect_honours_runner_environment_variable) {
    TempDir d;
    auto r = run_command("CGEMS_RUNNER=" + quote(d / "no-runner.json") + " '" + CGEMS_CLI + "' collect " +
                         quote(demo_manifest()) + " -o " + quote(d / "x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no-runner.json"), std::string::npos);
}

TEST(cli, collect_entry_failure_exits_1) {
    TempDir d;
    write_file(d / "ok.py", "print(1)\n");
    write_file(d / "m.json", R"([{"id": "ok", "generated": "ok.py", "functionality": 2},
                                 {"id": "gone", "generated": "gone.py", "functionality": 2}])");
    auto r = cli("collect " + quote(d / "m.json") + " --static-only -o " + quote(d / "x.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("gone"), std::string::npos);
    EXPECT_EQ(cgems::data::read_csv(d / "x.csv").size(), 1u);
}

TEST(cli, train_on_separable_data) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 7);
    auto r = cli("train " + quote(d / "sep.csv") + " --features 8 --seed 3 -o " + quote(d / "m.json") + " --json");
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = json::parse(r.out);
    EXPECT_EQ(rep["selection"]["selected"].size(), 8u);
    EXPECT_EQ(rep["test"]["actual"].size(), 13u);
    EXPECT_GE(rep["test"]["accuracy"].get<double>(), 0.95);
    auto model = cgems_test::load_json(d / "m.json");
    EXPECT_EQ(model["layer_sizes"], json::parse("[8, 14, 12, 2]"));
    EXPECT_TRUE(std::filesystem::exists(d / "m.json.run.json"));
    EXPECT_TRUE(std::filesystem::exists(d / "m.json.report.json"));
    EXPECT_EQ(cgems_test::load_json(d / "m.json.run.json")["seed"], 3);
}

TEST(cli, train_is_reproducible) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 9);
    const std::string base = "train " + quote(d / "sep.csv") + " --features 15 --epochs 200 -o ";
    ASSERT_EQ(cli(base + quote(d / "a.json")).code, 0);
    ASSERT_EQ(cli(base + quote(d / "b.json")).code, 0);
    EXPECT_EQ(slurp(d / "a.json"), slurp(d / "b.json"));
    auto m = cgems_test::load_json(d / "a.json");
    EXPECT_EQ(m["features"].size(), 15u);
}

TEST(cli, train_config_file_and_flag_override) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 11);
    write_file(d / "cfg.json", R"({"train": {"features": "all", "mlp": {"epochs": 50}, "seed": 5}})");
    auto r = cli("--config " + quote(d / "cfg.json") + " train " + quote(d / "sep.csv") + " -o " + quote(d / "m.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto m = cgems_test::load_json(d / "m.json");
    EXPECT_EQ(m["features"].size(), 30u);
    EXPECT_EQ(m["config"]["epochs"], 50);
    EXPECT_EQ(m["seed"], 5);
    r = cli("--config " + quote(d / "cfg.json") + " train " + quote(d / "sep.csv") + " --features 4 --seed 6 -o " +
            quote(d / "n.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto n = cgems_test::load_json(d / "n.json");
    EXPECT_EQ(n["features"].size(), 4u);
    EXPECT_EQ(n["seed"], 6);
    write_file(d / "bad.json", R"({"train": {"colour": "blue"}})");
    EXPECT_EQ(cli("--config " + quote(d / "bad.json") + " train " + quote(d / "sep.csv") + " -o " + quote(d / "x.json")).code, 2);
}

TEST(cli, train_rejects_bad_input) {
    TempDir d;
    EXPECT_EQ(cli("train " + quote(d / "none.csv") + " -o " + quote(d / "m.json")).code, 2);
    write_file(d / "bad.csv", "Program,LOC\nx,1\n");
    EXPECT_EQ(cli("train " + quote(d / "bad.csv") + " -o " + quote(d / "m.json")).code, 2);
    write_separable_csv(d / "sep.csv", 1);
    EXPECT_EQ(cli("train " + quote(d / "sep.csv") + " --features zero -o " + quote(d / "m.json")).code, 2);
}

TEST(cli, select_features_report) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 2);
    auto r = cli("select-features " + quote(d / "sep.csv") + " --features 5");
    ASSERT_EQ(r.code, 0) << r.err;
    auto s = json::parse(r.out)["selection"];
    EXPECT_EQ(s["selected"].size(), 5u);
    EXPECT_EQ(s["kept"].size() + s["pruned"].size(), 30u);
    EXPECT_NE(std::find(s["selected"].begin(), s["selected"].end(), "Comments"), s["selected"].end());
}

TEST(cli, predict_and_explain) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 4);
    ASSERT_EQ(cli("train " + quote(d / "sep.csv") + " --epochs 300 -o " + quote(d / "m.json")).code, 0);

    auto p = cli("predict " + quote(d / "m.json") + " --csv " + quote(d / "sep.csv"));
    ASSERT_EQ(p.code, 0) << p.err;
    auto pj = json::parse(p.out);
    ASSERT_EQ(pj["predictions"].size(), 84u);
    for (const auto& row : pj["predictions"]) {
        double sum = row["probabilities"][0].get<double>() + row["probabilities"][1].get<double>();
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    EXPECT_FALSE(pj["evaluation"].is_null());

    EXPECT_EQ(cli("predict " + quote(d / "m.json") + " --row 1,2,3").code, 2);
    EXPECT_EQ(cli("predict " + quote(d / "missing.json") + " --row 1").code, 2);
    EXPECT_EQ(cli("predict " + quote(d / "m.json")).code, 2);

    const std::string ex = "explain " + quote(d / "m.json") + " --csv " + quote(d / "sep.csv") +
                           " --program p5 --samples 1000 --seed 12";
    auto a = cli(ex + " -o " + quote(d / "e1.json") + " --bar-chart " + quote(d / "e.svg"));
    auto b = cli(ex + " -o " + quote(d / "e2.json"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(d / "e1.json"), slurp(d / "e2.json"));
    auto e = cgems_test::load_json(d / "e1.json")["explanations"][0];
    EXPECT_EQ(e["instance_id"], "p5");
    EXPECT_EQ(e["weights"].size(), 8u);
    EXPECT_NE(slurp(d / "e.svg").find("<svg"), std::string::npos);
    EXPECT_EQ(cli("explain " + quote(d / "m.json") + " --csv " + quote(d / "sep.csv") + " --program nope").code, 2);
}

TEST(cli, batch_explain_is_order_stable_under_jobs) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 5);
    ASSERT_EQ(cli("train " + quote(d / "sep.csv") + " --epochs 100 -o " + quote(d / "m.json")).code, 0);
    const std::string ex = "explain " + quote(d / "m.json") + " --csv " + quote(d / "sep.csv") + " --samples 200";
    ASSERT_EQ(cli(ex + " -o " + quote(d / "one.json")).code, 0);
    ASSERT_EQ(cli("-j 4 " + ex + " -o " + quote(d / "four.json")).code, 0);
    EXPECT_EQ(slurp(d / "one.json"), slurp(d / "four.json"));
}

TEST(cli, excluded_features_never_reach_the_model) {
    TempDir d;
    write_separable_csv(d / "sep.csv", 8);
    auto r = cli("train " + quote(d / "sep.csv") + " --features all --exclude Comments,LOC --epochs 20 -o " +
                 quote(d / "m.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto m = cgems_test::load_json(d / "m.json");
    EXPECT_EQ(m["features"].size(), 28u);
    for (const auto& f : m["features"]) {
        EXPECT_NE(f, "Comments");
        EXPECT_NE(f, "LOC");
    }
    EXPECT_EQ(cli("train " + quote(d / "sep.csv") + " --exclude Nope -o " + quote(d / "x.json")).code, 2);
}
