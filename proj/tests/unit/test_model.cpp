#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthetic.hpp"
#include "tempora/errors.hpp"
#include "tempora/model.hpp"
#include "tempora/rng.hpp"

using namespace tempora;
using namespace tempora::model;

namespace {

features::FeatureVector noise_row(Rng& rng, int year, const std::string& id) {
    features::FeatureVector fv;
    fv.doc_id = id;
    fv.year = year;
    fv.century_class = LabelScale::century().label_of(year);
    fv.decade_class = LabelScale::decade().label_of(year);
    for (auto& v : fv.values) v = rng.next_double();
    return fv;
}

// Binary corpus whose label is carried entirely by one feature column.
std::vector<features::FeatureVector> planted_rows(std::size_t n, std::size_t feature,
                                                  std::uint64_t seed) {
    Rng rng(seed);
    std::vector<features::FeatureVector> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool late = rng.uniform_below(2) == 1;
        auto fv = noise_row(rng, late ? 1950 : 1850, "p" + std::to_string(i));
        fv.values[feature] = late ? 0.75 + 0.25 * rng.next_double()
                                  : 0.25 * rng.next_double();
        rows.push_back(std::move(fv));
    }
    return rows;
}

TrainConfig small_config(LabelScale task, int rounds, std::uint64_t seed = 0) {
    TrainConfig config;
    config.task = task;
    config.n_rounds = rounds;
    config.max_depth = 3;
    config.learning_rate = 0.3;
    config.min_samples_leaf = 2;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("hyperparameter validation aggregates problems") {
    TrainConfig bad;
    bad.n_rounds = 0;
    bad.learning_rate = 1.5;
    bad.min_samples_leaf = 0;
    bad.histogram_bins = 1;
    bad.feature_subsample = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    TrainConfig negative_lr;
    negative_lr.learning_rate = 0.0;
    CHECK_THROWS_AS(validate(negative_lr), ConfigError);
    CHECK_NOTHROW(validate(TrainConfig{}));
}

TEST_CASE("rows map to labels through the task scale") {
    Rng rng(1);
    auto row = noise_row(rng, 1787, "r");
    CHECK(label_for(LabelScale::century(), row) == 1);
    CHECK(label_for(LabelScale::decade(), row) == 18);
    CHECK(label_for(LabelScale::binary(1900), row) == 0);
    row.year = 1900;
    CHECK(label_for(LabelScale::binary(1900), row) == 1);
    row.year = 1500;
    CHECK_THROWS_AS(label_for(LabelScale::century(), row), DataError);
}

TEST_CASE("training refuses an empty feature set") {
    CHECK_THROWS_AS(train({}, TrainConfig{}), DataError);
}

TEST_CASE("a single observed label yields a constant model and a warning") {
    Rng rng(2);
    std::vector<features::FeatureVector> rows;
    for (int i = 0; i < 20; ++i) rows.push_back(noise_row(rng, 1850, "c" + std::to_string(i)));
    const auto result = train(rows, small_config(LabelScale::century(), 10));
    REQUIRE(!result.warnings.empty());
    CHECK(result.warnings.front().find("constant") != std::string::npos);
    CHECK(result.model.trees.empty());
    CHECK(result.model.n_rounds_trained == 0);
    const auto proba = predict_proba(result.model, rows[0].values);
    CHECK(proba[2] >= 0.99);
}

TEST_CASE("a separable binary problem is learned to zero training error") {
    const auto rows = planted_rows(120, 5, 3);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 50));
    CHECK(result.model.n_classes == 2);
    CHECK(result.model.n_outputs == 1);
    for (const auto& row : rows) {
        CHECK(predict(result.model, row.values) ==
              label_for(LabelScale::binary(1900), row));
    }
}

TEST_CASE("a separable multiclass problem is learned to zero training error") {
    Rng rng(4);
    std::vector<features::FeatureVector> rows;
    for (int i = 0; i < 90; ++i) {
        const int cls = i % 3;
        auto fv = noise_row(rng, 1650 + cls * 100, "m" + std::to_string(i));
        fv.values[0] = 0.2 + 0.3 * cls + 0.05 * rng.next_double();
        rows.push_back(std::move(fv));
    }
    const auto result = train(rows, small_config(LabelScale::century(), 40));
    CHECK(result.model.n_outputs == 5);
    CHECK(result.model.trees.size() ==
          static_cast<std::size_t>(result.model.n_rounds_trained) * 5);
    for (const auto& row : rows) {
        CHECK(predict(result.model, row.values) == row.century_class);
    }
}

TEST_CASE("training loss never rises without feature subsampling") {
    const auto rows = planted_rows(150, 9, 11);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 40));
    REQUIRE(result.round_train_loss.size() ==
            static_cast<std::size_t>(result.model.n_rounds_trained));
    for (std::size_t r = 1; r < result.round_train_loss.size(); ++r) {
        CHECK(result.round_train_loss[r] <= result.round_train_loss[r - 1] + 1e-9);
    }
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto rows = planted_rows(100, 3, 17);
    auto config = small_config(LabelScale::binary(1900), 25, 42);
    config.feature_subsample = 0.5;
    const auto a = train(rows, config);
    const auto b = train(rows, config);
    CHECK(to_json(a.model) == to_json(b.model));
    CHECK(a.round_train_loss == b.round_train_loss);

    config.seed = 43;
    const auto c = train(rows, config);
    CHECK(to_json(a.model) != to_json(c.model));
}

TEST_CASE("probabilities form a simplex for every task head") {
    const auto rows = planted_rows(80, 2, 23);
    const auto binary = train(rows, small_config(LabelScale::binary(1900), 15));
    const auto multi = train(rows, small_config(LabelScale::century(), 15));
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = noise_row(rng, 1800, "x").values;
        for (const auto* m : {&binary.model, &multi.model}) {
            const auto proba = predict_proba(*m, x);
            CHECK(proba.size() == static_cast<std::size_t>(m->n_classes));
            double sum = 0.0;
            for (double p : proba) {
                CHECK(p >= 0.0);
                sum += p;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("raw scores and probabilities match hand computation") {
    TreeEnsemble m;
    m.task = LabelScale::century();
    m.n_classes = 5;
    m.n_outputs = 5;
    m.base_scores = {std::log(0.2), std::log(0.5), std::log(0.3),
                     std::log(1e-12), std::log(1e-12)};

    std::array<double, features::kFeatureCount> x{};
    auto proba = predict_proba(m, x);
    CHECK(proba[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(predict(m, x) == 1);

    Tree tree;
    tree.output = 0;
    tree.nodes.push_back({2, 0.5, 1, 2, 0.05, 1.0});
    tree.nodes.push_back({-1, 0.0, -1, -1, -0.4, 0.0});
    tree.nodes.push_back({-1, 0.0, -1, -1, 0.7, 0.0});
    m.trees.push_back(tree);

    x[2] = 0.3;
    auto raw = predict_raw(m, x);
    CHECK(raw[0] == doctest::Approx(std::log(0.2) - 0.4).epsilon(1e-12));
    x[2] = 0.5;  // boundary goes left
    CHECK(predict_raw(m, x)[0] == doctest::Approx(std::log(0.2) - 0.4).epsilon(1e-12));
    x[2] = 0.9;
    raw = predict_raw(m, x);
    CHECK(raw[0] == doctest::Approx(std::log(0.2) + 0.7).epsilon(1e-12));

    double z = 0.0;
    for (double s : raw) z += std::exp(s);
    proba = predict_proba(m, x);
    for (std::size_t c = 0; c < proba.size(); ++c) {
        CHECK(proba[c] == doctest::Approx(std::exp(raw[c]) / z).epsilon(1e-12));
    }
}

TEST_CASE("prediction ties resolve to the lowest class index") {
    TreeEnsemble coin;
    coin.task = LabelScale::binary(1900);
    coin.n_classes = 2;
    coin.n_outputs = 1;
    coin.base_scores = {0.0};
    std::array<double, features::kFeatureCount> x{};
    const auto proba = predict_proba(coin, x);
    CHECK(proba[0] == 0.5);
    CHECK(proba[1] == 0.5);
    CHECK(predict(coin, x) == 0);
}

TEST_CASE("gain importance concentrates on the planted feature") {
    const auto rows = planted_rows(300, 13, 29);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 20));
    const auto report = gain_importance(result.model);
    CHECK(!report.no_splits);
    double sum = 0.0;
    for (double g : report.gain) {
        CHECK(g >= 0.0);
        sum += g;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.rank[13] == 1);
    for (std::size_t f = 0; f < report.gain.size(); ++f) {
        if (f != 13) CHECK(report.gain[13] >= report.gain[f]);
    }
}

TEST_CASE("a model that never split reports no_splits") {
    Rng rng(6);
    std::vector<features::FeatureVector> rows;
    for (int i = 0; i < 10; ++i) {
        rows.push_back(noise_row(rng, i % 2 ? 1850 : 1950, "n" + std::to_string(i)));
    }
    auto config = small_config(LabelScale::binary(1900), 5);
    config.min_samples_leaf = 10;  // no split can satisfy both sides
    const auto result = train(rows, config);
    const auto report = gain_importance(result.model);
    CHECK(report.no_splits);
    for (double g : report.gain) CHECK(g == 0.0);
}

TEST_CASE("permutation importance singles out the planted feature") {
    const auto rows = planted_rows(400, 21, 31);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 15));
    auto report = gain_importance(result.model);
    permutation_importance(result.model, rows, ImportanceMetric::accuracy, 5, 7,
                           &report);
    CHECK(report.repeats == 5);
    CHECK(report.metric == ImportanceMetric::accuracy);
    for (std::size_t f = 0; f < report.perm_mean.size(); ++f) {
        if (f != 21) CHECK(report.perm_mean[21] > report.perm_mean[f]);
    }
}

TEST_CASE("shuffling an uninformative column moves the metric very little") {
    const auto rows = planted_rows(1000, 5, 37);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 10));
    auto report = gain_importance(result.model);
    permutation_importance(result.model, rows, ImportanceMetric::accuracy, 100, 11,
                           &report);
    CHECK(std::abs(report.perm_mean[7]) <= 0.02);
    CHECK(report.perm_mean[5] > 0.2);
}

TEST_CASE("a single repeat leaves no spread to report") {
    const auto rows = planted_rows(120, 2, 41);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 10));
    auto report = gain_importance(result.model);
    permutation_importance(result.model, rows, ImportanceMetric::f1_macro, 1, 3,
                           &report);
    for (double s : report.perm_std) CHECK(s == 0.0);
    CHECK_THROWS_AS(permutation_importance(result.model, rows,
                                           ImportanceMetric::accuracy, 0, 3, &report),
                    ConfigError);
    CHECK_THROWS_AS(permutation_importance(result.model, {},
                                           ImportanceMetric::accuracy, 1, 3, &report),
                    DataError);
}

TEST_CASE("permutation importance is deterministic in its seed") {
    const auto rows = planted_rows(150, 9, 43);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 10));
    auto a = gain_importance(result.model);
    auto b = gain_importance(result.model);
    permutation_importance(result.model, rows, ImportanceMetric::accuracy, 4, 9, &a);
    permutation_importance(result.model, rows, ImportanceMetric::accuracy, 4, 9, &b);
    CHECK(a.perm_mean == b.perm_mean);
    CHECK(a.perm_std == b.perm_std);
}

TEST_CASE("path contributions add up to the raw prediction") {
    const auto rows = planted_rows(200, 11, 47);
    const auto multi = train(rows, small_config(LabelScale::century(), 12));
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = noise_row(rng, 1700, "x").values;
        const auto raw = predict_raw(multi.model, x);
        const auto paths = path_contributions(multi.model, x);
        REQUIRE(paths.contributions.size() == raw.size());
        REQUIRE(paths.bias.size() == raw.size());
        for (std::size_t k = 0; k < raw.size(); ++k) {
            double total = paths.bias[k];
            for (double c : paths.contributions[k]) total += c;
            CHECK(total == doctest::Approx(raw[k]).epsilon(1e-6));
        }
    }
}

TEST_CASE("path contributions of hand-built trees are exact") {
    TreeEnsemble m;
    m.task = LabelScale::binary(1900);
    m.n_classes = 2;
    m.n_outputs = 1;
    m.base_scores = {0.25};

    std::array<double, features::kFeatureCount> x{};
    auto paths = path_contributions(m, x);
    CHECK(paths.bias[0] == 0.25);
    for (double c : paths.contributions[0]) CHECK(c == 0.0);

    Tree tree;
    tree.output = 0;
    tree.nodes.push_back({4, 0.5, 1, 2, 0.1, 2.0});
    tree.nodes.push_back({-1, 0.0, -1, -1, -0.6, 0.0});
    tree.nodes.push_back({-1, 0.0, -1, -1, 0.8, 0.0});
    m.trees.push_back(tree);

    x[4] = 0.2;
    paths = path_contributions(m, x);
    CHECK(paths.bias[0] == doctest::Approx(0.25 + 0.1).epsilon(1e-12));
    CHECK(paths.contributions[0][4] == doctest::Approx(-0.7).epsilon(1e-12));
    for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
        if (f != 4) CHECK(paths.contributions[0][f] == 0.0);
    }
}

TEST_CASE("models survive a disk round trip bit for bit") {
    testsupport::ScratchDir dir("model_io");
    const auto rows = planted_rows(100, 6, 53);
    const auto result = train(rows, small_config(LabelScale::century(), 8));

    const auto plain = dir.path() / "model.json";
    save(result.model, plain);
    const auto back = load(plain);
    CHECK(to_json(back) == to_json(result.model));

    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = noise_row(rng, 1900, "x").values;
        const auto pa = predict_proba(result.model, x);
        const auto pb = predict_proba(back, x);
        REQUIRE(pa.size() == pb.size());
        for (std::size_t c = 0; c < pa.size(); ++c) CHECK(pa[c] == pb[c]);
    }

    const auto gz = dir.path() / "model.json.gz";
    save(result.model, gz);
    CHECK(to_json(load(gz)) == to_json(result.model));
    // The gzip container must actually shrink the payload.
    CHECK(std::filesystem::file_size(gz) < std::filesystem::file_size(plain));
}

TEST_CASE("damaged model files are rejected") {
    testsupport::ScratchDir dir("model_bad");
    const auto rows = planted_rows(60, 1, 59);
    const auto result = train(rows, small_config(LabelScale::binary(1900), 5));
    const auto json = to_json(result.model);

    auto future = json;
    const auto pos = future.find("tempora.model/1");
    REQUIRE(pos != std::string::npos);
    future.replace(pos, 15, "tempora.model/9");
    CHECK_THROWS_AS(model_from_json(future), ModelError);

    auto schema = json;
    const auto spos = schema.find("tempora.features/1");
    REQUIRE(spos != std::string::npos);
    schema.replace(spos, 18, "tempora.features/7");
    CHECK_THROWS_AS(model_from_json(schema), ModelError);

    CHECK_THROWS_AS(model_from_json("{"), ModelError);
    CHECK_THROWS_AS(load(dir.path() / "absent.json"), ModelError);

    const auto gz = dir.path() / "model.json.gz";
    save(result.model, gz);
    const auto full = std::filesystem::file_size(gz);
    std::filesystem::resize_file(gz, full / 2);
    CHECK_THROWS_AS(load(gz), ModelError);
}
