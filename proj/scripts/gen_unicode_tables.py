#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.cpp from Python's unicodedata.

Emits flag ranges for the general categories the tokenizer needs
(letter, uppercase letter, decimal digit, punctuation) plus the simple
single-codepoint lowercase map. Run from the repository root:

    python3 scripts/gen_unicode_tables.py > core/src/unicode_tables.cpp
"""

import sys
import unicodedata

FLAG_LETTER = 1
FLAG_UPPER = 2
FLAG_DIGIT = 4
FLAG_PUNCT = 8

MAX_CP = 0x110000


def flags_of(cp: int) -> int:
    cat = unicodedata.category(chr(cp))
    f = 0
    if cat.startswith("L"):
        f |= FLAG_LETTER
    if cat == "Lu":
        f |= FLAG_UPPER
    if cat == "Nd":
        f |= FLAG_DIGIT
    if cat.startswith("P"):
        f |= FLAG_PUNCT
    return f


def ranges():
    out = []
    lo = 0
    cur = flags_of(0)
    for cp in range(1, MAX_CP):
        f = flags_of(cp)
        if f != cur:
            if cur:
                out.append((lo, cp - 1, cur))
            lo = cp
            cur = f
    if cur:
        out.append((lo, MAX_CP - 1, cur))
    return out


def lowercase_pairs():
    out = []
    for cp in range(MAX_CP):
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            out.append((cp, ord(lo)))
    return out


def main():
    rs = ranges()
    lows = lowercase_pairs()
    w = sys.stdout.write
    w("// Generated by scripts/gen_unicode_tables.py (unicodedata %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w('#include "unicode_tables.hpp"\n\n')
    w("namespace tempora::unicode {\n\n")
    w("const CategoryRange kCategoryRanges[] = {\n")
    for lo, hi, f in rs:
        w("    {0x%X, 0x%X, %d},\n" % (lo, hi, f))
    w("};\n")
    w("const std::size_t kCategoryRangeCount = %d;\n\n" % len(rs))
    w("const LowerPair kLowerPairs[] = {\n")
    for cp, lo in lows:
        w("    {0x%X, 0x%X},\n" % (cp, lo))
    w("};\n")
    w("const std::size_t kLowerPairCount = %d;\n\n" % len(lows))
    w("}  // namespace tempora::unicode\n")


if __name__ == "__main__":
    main()
