#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace testsupport {

namespace {

constexpr char32_t kEsc = 0xFFFF;

bool contains(const std::vector<char32_t>& symbols, char32_t c) {
    return std::binary_search(symbols.begin(), symbols.end(), c);
}

}  // namespace

double oracle_shannon_entropy(const std::u32string& text) {
    std::map<char32_t, std::size_t> freq;
    for (char32_t c : text) ++freq[c];
    const long double n = static_cast<long double>(text.size());
    long double h = 0.0L;
    for (const auto& [c, count] : freq) {
        const long double p = static_cast<long double>(count) / n;
        h -= p * std::log2(p);
    }
    return static_cast<double>(std::max(h, 0.0L));
}

OracleCode oracle_cross_code(const std::vector<std::u32string>& training,
                             const std::u32string& target, int order, double alpha,
                             const std::vector<char32_t>& symbols, bool escape) {
    const std::size_t k = static_cast<std::size_t>(order);
    const long double a = alpha;
    const long double asize = static_cast<long double>(symbols.size() + (escape ? 1 : 0));

    const auto map_sym = [&](char32_t c) { return contains(symbols, c) ? c : kEsc; };
    const auto window_known = [&](const std::u32string& t, std::size_t i) {
        for (std::size_t j = i - k; j <= i; ++j) {
            if (!contains(symbols, t[j])) return false;
        }
        return true;
    };

    std::map<std::u32string, std::map<char32_t, std::size_t>> counts;
    std::map<std::u32string, std::size_t> totals;
    for (const auto& t : training) {
        if (t.size() <= k) continue;
        for (std::size_t i = k; i < t.size(); ++i) {
            if (!escape && !window_known(t, i)) continue;
            std::u32string ctx;
            for (std::size_t j = i - k; j < i; ++j) ctx += map_sym(t[j]);
            ++counts[ctx][map_sym(t[i])];
            ++totals[ctx];
        }
    }

    OracleCode out;
    long double bits = 0.0L;
    for (std::size_t i = k; i < target.size(); ++i) {
        if (!escape && !window_known(target, i)) {
            ++out.oov_skipped;
            continue;
        }
        std::u32string ctx;
        for (std::size_t j = i - k; j < i; ++j) ctx += map_sym(target[j]);
        const char32_t next = map_sym(target[i]);
        long double count = 0.0L, total = 0.0L;
        auto it = counts.find(ctx);
        if (it != counts.end()) {
            auto jt = it->second.find(next);
            if (jt != it->second.end()) count = static_cast<long double>(jt->second);
            total = static_cast<long double>(totals[ctx]);
        }
        const long double p = (count + a) / (total + a * asize);
        bits -= std::log2(p);
        if (escape && !contains(symbols, target[i])) bits += 16.0L;
        ++out.chars_scored;
    }
    out.total_bits = static_cast<double>(bits);
    return out;
}

OracleCode oracle_adaptive_code(const std::u32string& text, int order, double alpha) {
    const std::size_t k = static_cast<std::size_t>(order);
    std::set<char32_t> uniq(text.begin(), text.end());
    const long double a = alpha;
    const long double asize = static_cast<long double>(uniq.size());

    std::map<std::u32string, std::map<char32_t, std::size_t>> counts;
    std::map<std::u32string, std::size_t> totals;
    OracleCode out;
    long double bits = 0.0L;
    for (std::size_t i = k; i < text.size(); ++i) {
        const std::u32string ctx = text.substr(i - k, k);
        long double count = 0.0L, total = 0.0L;
        auto it = counts.find(ctx);
        if (it != counts.end()) {
            auto jt = it->second.find(text[i]);
            if (jt != it->second.end()) count = static_cast<long double>(jt->second);
            total = static_cast<long double>(totals[ctx]);
        }
        bits -= std::log2((count + a) / (total + a * asize));
        ++out.chars_scored;
        ++counts[ctx][text[i]];
        ++totals[ctx];
    }
    out.total_bits = static_cast<double>(std::max(bits, 0.0L));
    return out;
}

}  // namespace testsupport
