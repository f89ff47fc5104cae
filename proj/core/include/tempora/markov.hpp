#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace tempora::markov {

// How a frozen model prices symbols that are not in its alphabet.
enum class OovPolicy { escape_symbol, clamp };

const char* to_string(OovPolicy policy);

// Sorted set of Unicode scalar values. With the escape policy one
// out-of-band ESC slot is appended after the real symbols; size()
// includes it.
class Alphabet {
public:
    static Alphabet build(const std::vector<std::u32string>& texts, OovPolicy policy);
    static Alphabet from_symbols(std::vector<char32_t> symbols, OovPolicy policy,
                                 bool has_escape);

    std::size_t size() const { return symbols_.size() + (escape_ ? 1 : 0); }
    bool has_escape() const { return escape_; }
    std::size_t escape_index() const { return symbols_.size(); }
    OovPolicy policy() const { return policy_; }
    const std::vector<char32_t>& symbols() const { return symbols_; }

    // Index into [0, size()). Returns -1 for symbols outside the
    // alphabet; callers apply the OOV policy.
    std::ptrdiff_t index_of(char32_t cp) const;

private:
    std::vector<char32_t> symbols_;
    bool escape_ = false;
    OovPolicy policy_ = OovPolicy::escape_symbol;
};

struct CodeLength {
    double total_bits = 0.0;
    double per_char_bits = 0.0;
    std::size_t chars_scored = 0;
    // Positions dropped under the clamp policy.
    std::size_t oov_skipped = 0;
};

// Character model conditioning each symbol on its preceding `order`
// symbols, with additive smoothing:
//   p(s|c) = (count(c,s) + alpha) / (total(c) + alpha * |A|)
// Contexts never observed fall back to the uniform 1/|A|.
class ContextModel {
public:
    ContextModel(int order, double alpha, Alphabet alphabet);

    int order() const { return order_; }
    double alpha() const { return alpha_; }
    const Alphabet& alphabet() const { return alphabet_; }
    bool frozen() const { return frozen_; }
    std::size_t n_contexts() const { return contexts_.size(); }

    // Smoothed probability by symbol index; context given as indices.
    double probability_by_index(const std::uint64_t* context, std::size_t next) const;

    // Convenience lookups by symbol value, applying the OOV policy to
    // map unknown symbols onto ESC. Returns 0 count / uniform
    // probability for contexts never seen.
    std::uint64_t count_of(const std::u32string& context, char32_t next) const;
    double probability(const std::u32string& context, char32_t next) const;

    struct ContextCounts {
        std::unordered_map<std::uint32_t, std::uint64_t> by_symbol;
        std::uint64_t total = 0;
    };
    const std::unordered_map<std::uint64_t, ContextCounts>& contexts() const {
        return contexts_;
    }

private:
    friend ContextModel fit_reference(const std::vector<std::u32string>&, int, double,
                                      Alphabet, std::size_t*);
    friend ContextModel model_from_json(const std::string&);
    friend CodeLength adaptive_code_length(const std::u32string&, int, double);

    std::uint64_t context_key(const std::uint64_t* context) const;
    void add_observation(const std::uint64_t* context, std::size_t next,
                         std::uint64_t n = 1);

    int order_;
    double alpha_;
    Alphabet alphabet_;
    bool frozen_ = false;
    std::unordered_map<std::uint64_t, ContextCounts> contexts_;
};

// Empirical entropy of the text's own character distribution, in bits
// per character. Errors on empty text.
double shannon_entropy(const std::u32string& text);

// Accumulates (context, next symbol) counts within each text
// independently; no pair spans a text boundary. Texts shorter than
// order+1 contribute nothing and are tallied into *texts_skipped.
ContextModel fit_reference(const std::vector<std::u32string>& texts, int order,
                           double alpha, Alphabet alphabet,
                           std::size_t* texts_skipped = nullptr);

// Total -log2 probability of target under the frozen model, scoring
// positions order..len-1. Escape policy: unknown symbols are priced as
// ESC and the unknown target symbol adds a flat 16-bit literal cost.
// Clamp policy: positions touching an unknown symbol are skipped and
// counted in oov_skipped.
CodeLength cross_code_length(const ContextModel& model, const std::u32string& target);

// cross_code_length normalized by chars_scored * log2(alphabet size).
// Zero scored positions yield 0.0.
double nrc(const ContextModel& model, const std::u32string& target);

// Average cross code length in bits per character.
double markov_entropy(const ContextModel& model, const std::u32string& target);

// markov_entropy(model, target) / shannon_entropy(target); 1.0 when the
// target has near-zero character entropy.
double entropy_ratio(const ContextModel& model, const std::u32string& target);

// Decode-synchronous self-compression: the alphabet is the text's own
// distinct characters, counts start empty, and each position is scored
// before its observation is recorded.
CodeLength adaptive_code_length(const std::u32string& text, int order, double alpha);

// adaptive_code_length total bits over an 8 bits/char baseline.
double compression_ratio(const std::u32string& text, int order, double alpha);

std::string to_json(const ContextModel& model);
ContextModel model_from_json(const std::string& json_text);

void save_model(const ContextModel& model, const std::filesystem::path& path);
ContextModel load_model(const std::filesystem::path& path);

}  // namespace tempora::markov
