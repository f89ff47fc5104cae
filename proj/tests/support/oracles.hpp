#pragma once

// Brute-force reference computations, written independently of the
// library internals: plain string-keyed maps, long double accumulation,
// no shared code paths. Used to cross-check entropy and code-length
// results to tight tolerances.

#include <cstddef>
#include <string>
#include <vector>

namespace testsupport {

double oracle_shannon_entropy(const std::u32string& text);

struct OracleCode {
    double total_bits = 0.0;
    std::size_t chars_scored = 0;
    std::size_t oov_skipped = 0;
};

// Recounts (context, next) pairs from the training texts and replays
// the smoothed pricing rule position by position. `symbols` is the
// sorted real alphabet; with `escape` one extra slot joins the
// smoothing denominator, out-of-alphabet characters map onto it, and an
// out-of-alphabet target adds a flat 16-bit literal. Without `escape`,
// windows touching an unknown character are dropped on both the
// counting and the pricing side.
OracleCode oracle_cross_code(const std::vector<std::u32string>& training,
                             const std::u32string& target, int order, double alpha,
                             const std::vector<char32_t>& symbols, bool escape);

// Replays the adaptive coder: alphabet = the text's own characters,
// counts start empty, score then update.
OracleCode oracle_adaptive_code(const std::u32string& text, int order, double alpha);

}  // namespace testsupport
