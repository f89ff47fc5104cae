#pragma once

#include <cstddef>
#include <cstdint>

namespace tempora::unicode {

enum : std::uint8_t {
    kFlagLetter = 1,
    kFlagUpper = 2,
    kFlagDigit = 4,
    kFlagPunct = 8,
};

struct CategoryRange {
    std::uint32_t lo;
    std::uint32_t hi;
    std::uint8_t flags;
};

struct LowerPair {
    std::uint32_t cp;
    std::uint32_t lower;
};

extern const CategoryRange kCategoryRanges[];
extern const std::size_t kCategoryRangeCount;

extern const LowerPair kLowerPairs[];
extern const std::size_t kLowerPairCount;

}  // namespace tempora::unicode
