#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tempora/markov.hpp"
#include "tempora/rng.hpp"

using namespace tempora;

namespace {

// Mildly skewed order-1 text over a lowercase alphabet; enough structure
// that the models have something to learn.
std::u32string sample_text(std::size_t length, std::uint64_t seed) {
    Rng rng(seed);
    std::u32string out;
    out.reserve(length);
    char32_t prev = U'a';
    for (std::size_t i = 0; i < length; ++i) {
        char32_t next;
        if (rng.next_double() < 0.5) {
            next = U'a' + static_cast<char32_t>((prev - U'a' + 1) % 26);
        } else {
            next = U'a' + static_cast<char32_t>(rng.uniform_below(26));
        }
        out.push_back(next);
        prev = next;
    }
    return out;
}

}  // namespace

static void FitReference(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto text = sample_text(1 << 16, 1);
    const auto alphabet =
        markov::Alphabet::build({text}, markov::OovPolicy::escape_symbol);
    for (auto _ : state) {
        auto model = markov::fit_reference({text}, order, 0.1, alphabet);
        benchmark::DoNotOptimize(model);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(FitReference)->Arg(1)->Arg(2);

static void CrossCodeLength(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto training = sample_text(1 << 16, 2);
    const auto alphabet =
        markov::Alphabet::build({training}, markov::OovPolicy::escape_symbol);
    const auto model = markov::fit_reference({training}, order, 0.1, alphabet);
    const auto target = sample_text(1 << 14, 3);
    for (auto _ : state) {
        const auto code = markov::cross_code_length(model, target);
        benchmark::DoNotOptimize(code.total_bits);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(target.size()));
}
BENCHMARK(CrossCodeLength)->Arg(1)->Arg(2);

static void AdaptiveCodeLength(benchmark::State& state) {
    const auto text = sample_text(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) {
        const auto code = markov::adaptive_code_length(text, 2, 0.1);
        benchmark::DoNotOptimize(code.total_bits);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(AdaptiveCodeLength)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

static void ShannonEntropy(benchmark::State& state) {
    const auto text = sample_text(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(markov::shannon_entropy(text));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ShannonEntropy)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
