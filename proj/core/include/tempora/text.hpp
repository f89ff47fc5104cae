#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace tempora::text {

struct DecodeResult {
    std::u32string text;
    std::size_t replacements = 0;  // invalid byte sequences replaced with U+FFFD
};

/// Decodes UTF-8, substituting U+FFFD for each invalid sequence.
DecodeResult decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Unicode general-category queries (generated table lookup).
bool is_letter(char32_t cp);       // L*
bool is_upper(char32_t cp);        // Lu
bool is_digit(char32_t cp);        // Nd
bool is_punctuation(char32_t cp);  // P*

/// Simple single-codepoint lowercase mapping; identity where none exists.
char32_t to_lower(char32_t cp);

}  // namespace tempora::text
