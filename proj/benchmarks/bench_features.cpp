#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tempora/features.hpp"
#include "tempora/markov.hpp"
#include "tempora/rng.hpp"
#include "tempora/text.hpp"

using namespace tempora;

namespace {

const char* kVocabulary[] = {
    "river",   "stone",  "morning", "letter", "between", "window", "quiet",
    "journey", "evening", "harbor", "signal", "garden",  "the",    "of",
    "and",     "with",   "telegraph", "telephone", "radio", "software",
};

std::string sample_document(std::size_t n_tokens, std::uint64_t seed) {
    Rng rng(seed);
    std::string text;
    for (std::size_t i = 0; i < n_tokens; ++i) {
        if (i > 0) text += i % 12 == 0 ? ". " : " ";
        text += kVocabulary[rng.uniform_below(std::size(kVocabulary))];
    }
    text += ".";
    return text;
}

struct Context {
    markov::ContextModel ref1;
    markov::ContextModel ref2;
    features::NeologismLexicon lexicon;

    static Context make() {
        const auto sample = text::decode_utf8(sample_document(4000, 7)).text;
        const auto alphabet =
            markov::Alphabet::build({sample}, markov::OovPolicy::escape_symbol);
        const double alpha = 1.0 / static_cast<double>(alphabet.size());
        return {markov::fit_reference({sample}, 1, alpha, alphabet),
                markov::fit_reference({sample}, 2, alpha, alphabet),
                features::default_lexicon()};
    }

    features::ExtractionContext view() const {
        features::ExtractionContext ctx;
        ctx.ref_order1 = &ref1;
        ctx.ref_order2 = &ref2;
        ctx.lexicon = &lexicon;
        return ctx;
    }
};

}  // namespace

static void Tokenize(benchmark::State& state) {
    const auto text =
        text::decode_utf8(sample_document(static_cast<std::size_t>(state.range(0)), 11))
            .text;
    for (auto _ : state) {
        benchmark::DoNotOptimize(features::tokenize(text));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Tokenize)->RangeMultiplier(4)->Range(256, 16384);

static void ExtractDocument(benchmark::State& state) {
    static const Context context = Context::make();
    const auto ctx = context.view();
    Document doc;
    doc.id = "bench";
    doc.text = sample_document(static_cast<std::size_t>(state.range(0)), 13);
    doc.year = 1900;
    doc.source = Source::synthetic;
    for (auto _ : state) {
        benchmark::DoNotOptimize(features::extract(doc, ctx));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ExtractDocument)->RangeMultiplier(4)->Range(256, 4096);

static void ExtractAllWorkers(benchmark::State& state) {
    static const Context context = Context::make();
    const auto ctx = context.view();
    std::vector<Document> docs;
    for (std::size_t i = 0; i < 64; ++i) {
        Document doc;
        doc.id = "bench" + std::to_string(i);
        doc.text = sample_document(400, 100 + i);
        doc.year = 1900;
        doc.source = Source::synthetic;
        docs.push_back(std::move(doc));
    }
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(features::extract_all(docs, ctx, workers));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(docs.size()));
}
BENCHMARK(ExtractAllWorkers)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
