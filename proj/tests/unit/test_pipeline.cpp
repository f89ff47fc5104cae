#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "synthetic.hpp"
#include "tempora/errors.hpp"
#include "tempora/features.hpp"
#include "tempora/pipeline.hpp"

using namespace tempora;
using namespace tempora::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE_MESSAGE(f.good(), "missing file: " << p.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << bytes;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = haystack.find(needle); at != std::string::npos;
         at = haystack.find(needle, at + needle.size())) {
        ++n;
    }
    return n;
}

// First column of every data row in a split manifest.
std::set<std::string> manifest_ids(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE_MESSAGE(f.good(), "missing manifest: " << p.string());
    std::set<std::string> ids;
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (!line.empty()) ids.insert(line.substr(0, line.find(',')));
    }
    return ids;
}

PipelineConfig write_and_load(const fs::path& dir, const nlohmann::json& j) {
    const fs::path p = dir / "config.json";
    spit(p, j.dump(2) + "\n");
    return load_config(p);
}

std::string error_message(const fs::path& config_path) {
    try {
        load_config(config_path);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("config hashing matches the FNV-1a reference vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("minimal config gets defaults and resolved paths") {
    testsupport::ScratchDir scratch("pipeline_config_defaults");
    spit(scratch.path() / "manifest.csv", "id,path,year,source\n");
    const auto config = write_and_load(
        scratch.path(), {{"manifest", "manifest.csv"}, {"work_dir", "work"}});

    CHECK(config.manifest.is_absolute());
    CHECK(config.manifest == scratch.path() / "manifest.csv");
    CHECK(config.work_dir.is_absolute());
    CHECK(config.work_dir == scratch.path() / "work");

    CHECK(config.ratios.train == doctest::Approx(0.65));
    CHECK(config.ratios.validation == doctest::Approx(0.25));
    CHECK(config.ratios.test == doctest::Approx(0.10));
    CHECK(config.split_seed == 0);
    CHECK(config.markov.orders == std::vector<int>{1, 2});
    CHECK_FALSE(config.markov.alpha.has_value());
    CHECK(config.markov.reference_budget_chars == 2'000'000);
    CHECK_FALSE(config.lexicon_path.has_value());
    CHECK(config.binary_threshold_year == 1900);
    CHECK(config.sweep_thresholds.empty());
    CHECK_FALSE(config.eval_auprc_weighted);
    CHECK(config.importance_metric == model::ImportanceMetric::accuracy);
    CHECK(config.importance_repeats == 10);

    CHECK(config.eval_topk.at("century") == std::vector<int>{1, 2});
    CHECK(config.eval_topk.at("decade") == std::vector<int>{1, 3, 5, 10});
    CHECK(config.eval_topk.at("binary") == std::vector<int>{1, 2});

    CHECK(config.train_century.n_rounds == 300);
    CHECK(config.train_century.max_depth == 6);
    CHECK(config.train_century.learning_rate == doctest::Approx(0.1));
    CHECK(config.train_century.min_samples_leaf == 5);
    CHECK(config.train_century.feature_subsample == doctest::Approx(1.0));
    CHECK(config.train_century.histogram_bins == 64);

    CHECK(config.config_hash == fnv1a_hex(slurp(scratch.path() / "config.json")));
    CHECK(config.config_hash.size() == 16);
}

TEST_CASE("config overrides reach the right fields") {
    testsupport::ScratchDir scratch("pipeline_config_overrides");
    spit(scratch.path() / "manifest.csv", "id,path,year,source\n");
    spit(scratch.path() / "lex.json", "placeholder\n");
    nlohmann::json j = {
        {"manifest", "manifest.csv"},
        {"work_dir", "out"},
        {"split", {{"ratios", {0.5, 0.3, 0.2}}, {"seed", 9}}},
        {"markov", {{"alpha", 0.5}, {"reference_budget_chars", 5000}}},
        {"lexicon", "lex.json"},
        {"train",
         {{"century",
           {{"n_rounds", 12},
            {"max_depth", 4},
            {"learning_rate", 0.2},
            {"min_samples_leaf", 3},
            {"feature_subsample", 0.8},
            {"histogram_bins", 32},
            {"seed", 3}}},
          {"binary", {{"threshold_year", 1800}}}}},
        {"sweep", {{"thresholds", {1700, 1800}}, {"seed", 7}}},
        {"eval",
         {{"auprc", "weighted"}, {"topk", {{"century", {1, 3}}}}}},
        {"importance", {{"metric", "f1_macro"}, {"repeats", 3}, {"seed", 5}}},
    };
    const auto config = write_and_load(scratch.path(), j);

    CHECK(config.ratios.train == doctest::Approx(0.5));
    CHECK(config.ratios.validation == doctest::Approx(0.3));
    CHECK(config.ratios.test == doctest::Approx(0.2));
    CHECK(config.split_seed == 9);
    REQUIRE(config.markov.alpha.has_value());
    CHECK(*config.markov.alpha == doctest::Approx(0.5));
    CHECK(config.markov.reference_budget_chars == 5000);
    REQUIRE(config.lexicon_path.has_value());
    CHECK(*config.lexicon_path == scratch.path() / "lex.json");
    CHECK(config.binary_threshold_year == 1800);
    CHECK(config.sweep_thresholds == std::vector<int>{1700, 1800});
    CHECK(config.sweep_seed == 7);
    CHECK(config.eval_auprc_weighted);
    CHECK(config.eval_topk.at("century") == std::vector<int>{1, 3});
    CHECK(config.eval_topk.at("decade") == std::vector<int>{1, 3, 5, 10});
    CHECK(config.importance_metric == model::ImportanceMetric::f1_macro);
    CHECK(config.importance_repeats == 3);
    CHECK(config.importance_seed == 5);

    const auto tc = train_config(config, TaskKind::century);
    CHECK(tc.n_rounds == 12);
    CHECK(tc.max_depth == 4);
    CHECK(tc.learning_rate == doctest::Approx(0.2));
    CHECK(tc.min_samples_leaf == 3);
    CHECK(tc.feature_subsample == doctest::Approx(0.8));
    CHECK(tc.histogram_bins == 32);
    CHECK(tc.seed == 3);
    CHECK(tc.task.describe() == "century");

    const auto binary = task_scale(config, TaskKind::binary);
    CHECK(binary.describe() == "binary@1800");
    CHECK(binary.label_of(1799) == 0);
    CHECK(binary.label_of(1800) == 1);

    // The decade section was never given, so its training knobs stay at
    // the defaults even though the century section moved.
    const auto dc = train_config(config, TaskKind::decade);
    CHECK(dc.n_rounds == 300);
    CHECK(dc.task.describe() == "decade");
}

TEST_CASE("config problems are aggregated into one error") {
    testsupport::ScratchDir scratch("pipeline_config_problems");
    nlohmann::json j = {
        {"manifest", "missing.csv"},
        {"work_dir", "work"},
        {"split", {{"ratios", {0.5, 0.5, 0.5}}}},
        {"markov", {{"orders", {1}}}},
        {"train", {{"binary", {{"threshold_year", 1905}}}}},
    };
    const fs::path p = scratch.path() / "config.json";
    spit(p, j.dump(2) + "\n");

    CHECK_THROWS_AS(load_config(p), ConfigError);
    const std::string msg = error_message(p);
    CHECK(msg.find("invalid config") != std::string::npos);
    CHECK(msg.find("manifest does not exist") != std::string::npos);
    CHECK(msg.find("sum to 1") != std::string::npos);
    CHECK(msg.find("markov.orders must be [1, 2]") != std::string::npos);
    CHECK(msg.find("threshold_year") != std::string::npos);
    CHECK(count_occurrences(msg, "\n  - ") >= 4);
}

TEST_CASE("config that is not JSON is rejected") {
    testsupport::ScratchDir scratch("pipeline_config_badjson");
    const fs::path p = scratch.path() / "config.json";
    spit(p, "{ this is not json\n");
    CHECK_THROWS_AS(load_config(p), ConfigError);
    CHECK(error_message(p).find("not valid JSON") != std::string::npos);
}

TEST_CASE("missing config file is a configuration error") {
    testsupport::ScratchDir scratch("pipeline_config_absent");
    const fs::path p = scratch.path() / "absent.json";
    CHECK_THROWS_AS(load_config(p), ConfigError);
    CHECK(error_message(p).find("cannot open config file") != std::string::npos);
}

TEST_CASE("pipeline commands build a full work tree on a planted corpus") {
    testsupport::ScratchDir scratch("pipeline_e2e");
    const auto corpus =
        testsupport::write_planted_corpus(scratch.path() / "corpus", 40, 11);
    nlohmann::json j = {
        {"manifest", "corpus/manifest.csv"},
        {"work_dir", "work"},
        {"split", {{"seed", 1}}},
        {"train",
         {{"century",
           {{"n_rounds", 25},
            {"max_depth", 3},
            {"learning_rate", 0.3},
            {"min_samples_leaf", 2}}}}},
        {"sweep", {{"thresholds", {1800, 1900}}, {"seed", 2}}},
        {"importance", {{"repeats", 3}, {"seed", 4}}},
    };
    const auto config = write_and_load(scratch.path(), j);
    const fs::path work = config.work_dir;

    cmd_split(config, false);
    const auto train_ids = manifest_ids(work / "split" / "train.csv");
    const auto val_ids = manifest_ids(work / "split" / "validation.csv");
    const auto test_ids = manifest_ids(work / "split" / "test.csv");
    CHECK(train_ids.size() + val_ids.size() + test_ids.size() == corpus.ids.size());
    CHECK(train_ids.size() > val_ids.size());
    CHECK(!val_ids.empty());
    CHECK(!test_ids.empty());
    for (const auto& id : val_ids) CHECK(train_ids.count(id) == 0);
    for (const auto& id : test_ids) {
        CHECK(train_ids.count(id) == 0);
        CHECK(val_ids.count(id) == 0);
    }
    const auto ingest =
        nlohmann::json::parse(slurp(work / "split" / "ingestion_report.json"));
    CHECK(ingest.at("loaded").get<std::size_t>() == corpus.ids.size());
    CHECK(ingest.at("config_hash").get<std::string>() == config.config_hash);

    cmd_extract(config, "train", 2, false);
    CHECK(fs::exists(work / "refs" / "order1.json"));
    CHECK(fs::exists(work / "refs" / "order2.json"));
    const auto meta = nlohmann::json::parse(slurp(work / "refs" / "refs_meta.json"));
    CHECK(meta.at("version").get<std::string>() == "tempora.refs/1");
    CHECK(meta.at("alpha").get<double>() > 0.0);
    const auto ids_used = meta.at("ids_used").get<std::vector<std::string>>();
    CHECK(!ids_used.empty());
    // No leakage: reference texts come from the training split only.
    for (const auto& id : ids_used) CHECK(train_ids.count(id) == 1);

    cmd_extract(config, "validation", 1, false);
    cmd_extract(config, "test", 1, false);
    for (const char* split : {"train", "validation", "test"}) {
        CAPTURE(split);
        CHECK(fs::exists(work / "features" / (std::string(split) + ".csv")));
        const auto report = nlohmann::json::parse(slurp(
            work / "features" / ("extract_report_" + std::string(split) + ".json")));
        CHECK(report.at("version").get<std::string>() == "tempora.extract/1");
    }
    const auto train_rows = features::read_features_csv(work / "features" / "train.csv");
    CHECK(train_rows.size() == train_ids.size());
    for (const auto& row : train_rows) CHECK(train_ids.count(row.doc_id) == 1);

    // Worker count must not change a byte of the output.
    const std::string val_once = slurp(work / "features" / "validation.csv");
    cmd_extract(config, "validation", 4, false);
    CHECK(slurp(work / "features" / "validation.csv") == val_once);

    cmd_train(config, TaskKind::century, false);
    const fs::path model_path = work / "models" / "century.json";
    CHECK(fs::exists(model_path));
    const auto log = nlohmann::json::parse(
        slurp(work / "models" / "train_log_century.json"));
    CHECK(log.at("version").get<std::string>() == "tempora.train_log/1");
    CHECK(log.at("task").get<std::string>() == "century");
    CHECK(log.at("n_rows").get<std::size_t>() == train_ids.size());
    CHECK(log.at("n_rounds_trained").get<int>() == 25);
    CHECK(log.at("round_train_loss").size() == 25);
    CHECK(log.at("config_hash").get<std::string>() == config.config_hash);

    const std::string model_once = slurp(model_path);
    cmd_train(config, TaskKind::century, false);
    CHECK(slurp(model_path) == model_once);

    cmd_eval(config, TaskKind::century, "test", false);
    const fs::path metrics_path = work / "reports" / "metrics_century_test.json";
    const auto metrics = nlohmann::json::parse(slurp(metrics_path));
    CHECK(metrics.at("version").get<std::string>() == "tempora.metrics/1");
    CHECK(metrics.at("task").get<std::string>() == "century");
    CHECK(metrics.at("split").get<std::string>() == "test");
    CHECK(metrics.at("n_samples").get<std::size_t>() == test_ids.size());
    const double acc = metrics.at("accuracy").get<double>();
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(metrics.at("config_hash").get<std::string>() == config.config_hash);
    const std::string csv = slurp(work / "reports" / "metrics_century_test.csv");
    CHECK(csv.rfind("task,split,n_samples,accuracy,", 0) == 0);

    const std::string metrics_once = slurp(metrics_path);
    cmd_eval(config, TaskKind::century, "test", false);
    CHECK(slurp(metrics_path) == metrics_once);

    cmd_sweep(config, false);
    const auto sweep = nlohmann::json::parse(slurp(work / "reports" / "sweep.json"));
    CHECK(sweep.at("version").get<std::string>() == "tempora.sweep/1");
    CHECK(sweep.at("points").size() == 2);
    CHECK(sweep.at("config_hash").get<std::string>() == config.config_hash);
    CHECK(fs::exists(work / "reports" / "sweep.csv"));

    cmd_importance(config, TaskKind::century, false);
    const auto imp =
        nlohmann::json::parse(slurp(work / "reports" / "importance_century.json"));
    CHECK(imp.at("version").get<std::string>() == "tempora.importance/1");
    CHECK(imp.at("repeats").get<int>() == 3);
    CHECK(imp.at("features").size() == features::kFeatureCount);

    // Prediction goes to stdout as one JSON document.
    const fs::path input = scratch.path() / "sample.txt";
    spit(input,
         "The telegraph lines hummed over the river, and the locomotive "
         "waited at the junction for the morning post to arrive.\n");
    std::ostringstream captured;
    auto* old_buf = std::cout.rdbuf(captured.rdbuf());
    cmd_predict(config, model_path, input, false);
    std::cout.rdbuf(old_buf);
    const auto pred = nlohmann::json::parse(captured.str());
    CHECK(pred.at("version").get<std::string>() == "tempora.prediction/1");
    CHECK(pred.at("task").get<std::string>() == "century");
    const auto proba = pred.at("probabilities").get<std::vector<double>>();
    REQUIRE(proba.size() == 5);
    double mass = 0.0;
    for (double p : proba) {
        CHECK(p >= 0.0);
        mass += p;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pred.at("topk").size() == 5);
    CHECK(pred.at("path_contributions").size() <= 10);
    CHECK(pred.at("config_hash").get<std::string>() == config.config_hash);
    CHECK(pred.at("warnings").empty());

    // An empty input still predicts, with a warning attached.
    const fs::path empty_input = scratch.path() / "empty.txt";
    spit(empty_input, "");
    std::ostringstream captured_empty;
    old_buf = std::cout.rdbuf(captured_empty.rdbuf());
    cmd_predict(config, model_path, empty_input, false);
    std::cout.rdbuf(old_buf);
    const auto pred_empty = nlohmann::json::parse(captured_empty.str());
    REQUIRE(pred_empty.at("warnings").size() == 1);
    const auto warning = pred_empty.at("warnings")[0].get<std::string>();
    CHECK(warning.find("empty") != std::string::npos);
}

TEST_CASE("commands demand their prerequisites in order") {
    testsupport::ScratchDir scratch("pipeline_prereqs");
    const auto corpus =
        testsupport::write_planted_corpus(scratch.path() / "corpus", 2, 3);
    PipelineConfig config;
    config.manifest = corpus.manifest;
    config.work_dir = scratch.path() / "work";
    config.config_hash = "feedfacefeedface";
    config.eval_topk = {{"century", {1}}, {"decade", {1}}, {"binary", {1}}};

    SUBCASE("extract before split") {
        CHECK_THROWS_AS(cmd_extract(config, "train", 1, false), DataError);
    }
    SUBCASE("extract of a held-out split before references exist") {
        cmd_split(config, false);
        CHECK_THROWS_AS(cmd_extract(config, "validation", 1, false), DataError);
        try {
            cmd_extract(config, "validation", 1, false);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("fit references first") !=
                  std::string::npos);
        }
    }
    SUBCASE("extract of an unknown split") {
        CHECK_THROWS_AS(cmd_extract(config, "holdout", 1, false), ConfigError);
    }
    SUBCASE("train before extract") {
        CHECK_THROWS_AS(cmd_train(config, TaskKind::century, false), DataError);
    }
    SUBCASE("eval of an unknown split") {
        CHECK_THROWS_AS(cmd_eval(config, TaskKind::century, "holdout", false),
                        ConfigError);
    }
    SUBCASE("eval before train") {
        CHECK_THROWS_AS(cmd_eval(config, TaskKind::decade, "test", false), ModelError);
    }
    SUBCASE("importance before train") {
        CHECK_THROWS_AS(cmd_importance(config, TaskKind::century, false), ModelError);
    }
    SUBCASE("sweep with no thresholds configured") {
        CHECK_THROWS_AS(cmd_sweep(config, false), ConfigError);
    }
    SUBCASE("sweep before all splits are extracted") {
        config.sweep_thresholds = {1800};
        CHECK_THROWS_AS(cmd_sweep(config, false), DataError);
    }
}
