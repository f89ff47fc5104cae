#include <benchmark/benchmark.h>

#include <array>
#include <string>
#include <vector>

#include "tempora/model.hpp"
#include "tempora/rng.hpp"

using namespace tempora;

namespace {

std::vector<features::FeatureVector> synthetic_rows(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const int years[5] = {1650, 1750, 1850, 1950, 2010};
    std::vector<features::FeatureVector> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        features::FeatureVector fv;
        fv.doc_id = "row" + std::to_string(i);
        fv.year = years[i % 5];
        fv.century_class = LabelScale::century().label_of(fv.year);
        fv.decade_class = LabelScale::decade().label_of(fv.year);
        for (auto& v : fv.values) v = rng.next_double();
        // Two informative columns keep the splits from degenerating.
        fv.values[3] = 0.2 * static_cast<double>(i % 5) + 0.1 * rng.next_double();
        fv.values[17] = fv.values[3] + 0.05 * rng.next_double();
        rows.push_back(std::move(fv));
    }
    return rows;
}

model::TreeEnsemble trained_model(std::size_t n_rows) {
    model::TrainConfig config;
    config.n_rounds = 20;
    config.max_depth = 4;
    config.learning_rate = 0.2;
    config.min_samples_leaf = 2;
    return model::train(synthetic_rows(n_rows, 3), config).model;
}

}  // namespace

static void TrainCentury(benchmark::State& state) {
    const auto rows = synthetic_rows(static_cast<std::size_t>(state.range(0)), 1);
    model::TrainConfig config;
    config.n_rounds = 20;
    config.max_depth = 4;
    config.learning_rate = 0.2;
    config.min_samples_leaf = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model::train(rows, config));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(TrainCentury)->RangeMultiplier(2)->Range(128, 1024)
    ->Unit(benchmark::kMillisecond);

static void PredictProba(benchmark::State& state) {
    static const model::TreeEnsemble m = trained_model(512);
    Rng rng(9);
    std::array<double, features::kFeatureCount> x;
    for (auto& v : x) v = rng.next_double();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model::predict_proba(m, x));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(PredictProba);

static void PathContributions(benchmark::State& state) {
    static const model::TreeEnsemble m = trained_model(512);
    Rng rng(10);
    std::array<double, features::kFeatureCount> x;
    for (auto& v : x) v = rng.next_double();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model::path_contributions(m, x));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(PathContributions);

static void PermutationImportance(benchmark::State& state) {
    static const model::TreeEnsemble m = trained_model(256);
    static const auto rows = synthetic_rows(256, 5);
    for (auto _ : state) {
        auto report = model::gain_importance(m);
        model::permutation_importance(m, rows, model::ImportanceMetric::accuracy, 2, 1,
                                      &report);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(features::kFeatureCount));
}
BENCHMARK(PermutationImportance)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
