#pragma once

// Shared fixtures for unit and acceptance tests: scratch directories,
// seeded order-1 character sources, planted-signal corpora, and the
// golden fixture documents.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tempora/corpus.hpp"
#include "tempora/markov.hpp"
#include "tempora/rng.hpp"

namespace testsupport {

// Fresh directory under the system temp root; removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name);
    ~ScratchDir();
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Order-1 character source: each symbol has one preferred successor
// carrying `bias` probability mass; the rest is spread uniformly.
struct Order1Source {
    std::vector<char32_t> alphabet;
    std::vector<std::size_t> preferred;
    double bias = 0.6;
};

Order1Source make_source(const std::vector<char32_t>& alphabet,
                         std::uint64_t perm_seed, double bias);

std::u32string sample_text(const Order1Source& source, std::size_t length,
                           tempora::Rng& rng);

struct GeneratedCorpus {
    std::filesystem::path manifest;
    std::vector<std::string> ids;
    std::vector<int> years;
};

// Five pseudo-century classes, each with its own character source,
// period-lexicon vocabulary, and function-word cadence. Writes one text
// file per document plus a manifest CSV under `dir`.
GeneratedCorpus write_planted_corpus(const std::filesystem::path& dir,
                                     std::size_t docs_per_class, std::uint64_t seed);

// Two styles with a hard swap at change_year: documents dated before it
// use one source/vocabulary/cadence, documents at or after it another.
// Years cover sixteen decades centered on change_year.
GeneratedCorpus write_changepoint_corpus(const std::filesystem::path& dir,
                                         int change_year, std::size_t n_docs,
                                         std::uint64_t seed);

// The ten fixed documents behind the feature golden file: empty,
// single-character, boilerplate-wrapped, accented, apostrophe-heavy,
// and other edge cases. Texts are already cleaned the way ingestion
// would clean them.
std::vector<tempora::Document> golden_fixture_documents();

// Frozen order-1/order-2 references fit on the non-empty fixture texts
// with the default smoothing choice.
std::pair<tempora::markov::ContextModel, tempora::markov::ContextModel>
golden_fixture_references();

}  // namespace testsupport
