#include "tempora/text.hpp"

#include <algorithm>

#include "unicode_tables.hpp"

namespace tempora::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

std::uint8_t flags_of(char32_t cp) {
    using unicode::kCategoryRanges;
    using unicode::kCategoryRangeCount;
    std::size_t lo = 0, hi = kCategoryRangeCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        const auto& r = kCategoryRanges[mid];
        if (cp < r.lo) {
            hi = mid;
        } else if (cp > r.hi) {
            lo = mid + 1;
        } else {
            return r.flags;
        }
    }
    return 0;
}

}  // namespace

DecodeResult decode_utf8(std::string_view bytes) {
    DecodeResult out;
    out.text.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        const unsigned char b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out.text.push_back(b0);
            ++i;
            continue;
        }
        std::size_t need;
        char32_t cp;
        char32_t min_cp;
        if ((b0 & 0xE0) == 0xC0) {
            need = 1;
            cp = b0 & 0x1F;
            min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            need = 2;
            cp = b0 & 0x0F;
            min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            need = 3;
            cp = b0 & 0x07;
            min_cp = 0x10000;
        } else {
            out.text.push_back(kReplacement);
            ++out.replacements;
            ++i;
            continue;
        }
        if (i + need >= n) {
            out.text.push_back(kReplacement);
            ++out.replacements;
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t j = i + 1; j <= i + need; ++j) {
            const unsigned char bj = static_cast<unsigned char>(bytes[j]);
            if ((bj & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bj & 0x3F);
        }
        if (!valid || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.text.push_back(kReplacement);
            ++out.replacements;
            ++i;  // resync on the next byte
            continue;
        }
        out.text.push_back(cp);
        i += need + 1;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

bool is_letter(char32_t cp) { return flags_of(cp) & unicode::kFlagLetter; }
bool is_upper(char32_t cp) { return flags_of(cp) & unicode::kFlagUpper; }
bool is_digit(char32_t cp) { return flags_of(cp) & unicode::kFlagDigit; }
bool is_punctuation(char32_t cp) { return flags_of(cp) & unicode::kFlagPunct; }

char32_t to_lower(char32_t cp) {
    using unicode::kLowerPairs;
    using unicode::kLowerPairCount;
    std::size_t lo = 0, hi = kLowerPairCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (kLowerPairs[mid].cp < cp) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < kLowerPairCount && kLowerPairs[lo].cp == cp) {
        return kLowerPairs[lo].lower;
    }
    return cp;
}

}  // namespace tempora::text
