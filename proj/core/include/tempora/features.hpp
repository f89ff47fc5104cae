#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tempora/corpus.hpp"
#include "tempora/markov.hpp"

namespace tempora::features {

inline constexpr char kSchemaVersion[] = "tempora.features/1";
inline constexpr std::size_t kFeatureCount = 44;
inline constexpr std::size_t kFunctionWordCount = 17;
inline constexpr std::size_t kLexiconPeriodCount = 8;

enum class Domain { compression, lexical_structure, readability, neologism, distance };

const char* to_string(Domain domain);

// Fixed, versioned schema: 7 compression, 7 lexical structure,
// 2 readability, 11 neologism, 17 function-word distance names. CSV
// column order equals this order.
const std::vector<std::string>& feature_names();
Domain feature_domain(std::size_t index);
std::ptrdiff_t feature_index(std::string_view name);

struct FeatureVector {
    std::string doc_id;
    int year = 0;
    // -1 when the document carries no usable year (prediction inputs).
    int century_class = -1;
    int decade_class = -1;
    std::array<double, kFeatureCount> values{};
};

struct CharStats {
    std::size_t total_chars = 0;
    std::size_t punctuation_chars = 0;
    std::size_t uppercase_chars = 0;
    std::size_t digit_chars = 0;
};

struct Tokenized {
    // Maximal Unicode-letter runs, apostrophes kept between letters,
    // lowercased, UTF-8 encoded.
    std::vector<std::string> tokens;
    std::size_t sentence_count = 0;
    CharStats chars;
};

Tokenized tokenize(const std::u32string& text);

// Vowel-group heuristic over a lowercase token: maximal runs of
// a/e/i/o/u/y count one each; a terminal e after a consonant is
// dropped only when the count stays above 1; minimum 1.
int count_syllables(std::string_view word);

struct LexiconPeriod {
    std::string name;
    int start_year = 0;
    int end_year = 0;
    std::unordered_set<std::string> words;
};

struct NeologismLexicon {
    std::vector<LexiconPeriod> periods;
    int modern_cutoff_year = 1900;
};

// Eight contiguous periods covering 1600-2020 with disjoint lowercase
// word sets. Throws ConfigError on violations.
void validate_lexicon(const NeologismLexicon& lexicon);

const NeologismLexicon& default_lexicon();
NeologismLexicon lexicon_from_json(const std::string& json_text);
NeologismLexicon load_lexicon(const std::filesystem::path& path);

// The 17 distance targets, in schema order.
const std::array<std::string, kFunctionWordCount>& function_words();

// 175 pinned English function words used by stopword_ratio.
const std::unordered_set<std::string>& stopword_set();

// [avg_word_length, lexical_richness, avg_sentence_length,
//  syllables_per_word, punctuation_density, uppercase_ratio,
//  digit_ratio]; ratios fall back to 0 on empty denominators.
std::array<double, 7> lexical_structure_features(const Tokenized& tok);

// [flesch_reading_ease, stopword_ratio]; both 0 without word tokens.
std::array<double, 2> readability_features(const Tokenized& tok,
                                           const std::unordered_set<std::string>& stopwords);

// 8 per-period presence booleans, the two era aggregates, and
// vocabulary modernity.
std::array<double, 11> neologism_features(const std::vector<std::string>& tokens,
                                          const NeologismLexicon& lexicon);

// Mean token gap between successive occurrences of each function word;
// 0.0 with fewer than two occurrences.
std::array<double, kFunctionWordCount> distance_features(
    const std::vector<std::string>& tokens);

// [shannon_entropy, nrc_o1, nrc_o2, entropy_ratio_o1, entropy_ratio_o2,
//  compression_ratio_o1, compression_ratio_o2]. Texts under 3
// characters yield all zeros and set *degenerate. The adaptive coder
// uses alpha = 1/|text alphabet|.
std::array<double, 7> compression_features(const std::u32string& text,
                                           const markov::ContextModel& ref_order1,
                                           const markov::ContextModel& ref_order2,
                                           bool* degenerate = nullptr);

// Shared immutable inputs for extraction. Null lexicon/stopwords fall
// back to the embedded defaults.
struct ExtractionContext {
    const markov::ContextModel* ref_order1 = nullptr;
    const markov::ContextModel* ref_order2 = nullptr;
    const NeologismLexicon* lexicon = nullptr;
    const std::unordered_set<std::string>* stopwords = nullptr;
};

struct ExtractionReport {
    std::size_t documents = 0;
    std::size_t degenerate_compression = 0;
    std::size_t empty_documents = 0;
};

FeatureVector extract(const Document& doc, const ExtractionContext& ctx,
                      bool* degenerate = nullptr);

// Data-parallel over documents; output order equals input order and is
// identical for every worker count.
std::vector<FeatureVector> extract_all(const std::vector<Document>& docs,
                                       const ExtractionContext& ctx, int workers,
                                       ExtractionReport* report = nullptr);

std::string features_csv_header();
std::string features_csv_row(const FeatureVector& row);
void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path);

}  // namespace tempora::features
