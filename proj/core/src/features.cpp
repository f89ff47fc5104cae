#include "tempora/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "tempora/errors.hpp"
#include "tempora/text.hpp"

namespace tempora::features {

namespace {

constexpr char32_t kApostrophe = U'\'';
constexpr char32_t kRightSingleQuote = U'’';

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

}  // namespace

Tokenized tokenize(const std::u32string& text) {
    Tokenized out;
    out.chars.total_chars = text.size();
    for (char32_t c : text) {
        if (text::is_punctuation(c)) ++out.chars.punctuation_chars;
        if (text::is_upper(c)) ++out.chars.uppercase_chars;
        if (text::is_digit(c)) ++out.chars.digit_chars;
    }

    std::u32string current;
    const auto flush = [&] {
        if (!current.empty()) {
            std::string token;
            for (char32_t c : current) text::append_utf8(token, text::to_lower(c));
            out.tokens.push_back(std::move(token));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char32_t c = text[i];
        if (text::is_letter(c)) {
            current.push_back(c);
        } else if ((c == kApostrophe || c == kRightSingleQuote) && !current.empty() &&
                   i + 1 < text.size() && text::is_letter(text[i + 1])) {
            // Apostrophes survive only between letters; both the ASCII
            // quote and U+2019 normalize to the former.
            current.push_back(kApostrophe);
        } else {
            flush();
            if (c == U'.' || c == U'!' || c == U'?') {
                // A run of terminators closes exactly one sentence.
                ++out.sentence_count;
                while (i + 1 < text.size() &&
                       (text[i + 1] == U'.' || text[i + 1] == U'!' || text[i + 1] == U'?')) {
                    ++i;
                }
            }
        }
    }
    flush();
    if (out.sentence_count == 0 && !out.tokens.empty()) out.sentence_count = 1;
    return out;
}

int count_syllables(std::string_view word) {
    int groups = 0;
    bool in_group = false;
    char prev = '\0';
    char prev_prev = '\0';
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_group) {
                ++groups;
                in_group = true;
            }
        } else {
            in_group = false;
        }
        prev_prev = prev;
        prev = c;
    }
    if (prev == 'e' && prev_prev != '\0' && !is_vowel(prev_prev) && groups > 2) {
        --groups;
    }
    return groups < 1 ? 1 : groups;
}

std::array<double, 7> lexical_structure_features(const Tokenized& tok) {
    std::array<double, 7> out{};
    const double n_tokens = static_cast<double>(tok.tokens.size());
    if (!tok.tokens.empty()) {
        std::size_t letters = 0;
        std::size_t syllables = 0;
        std::unordered_set<std::string_view> types;
        for (const auto& t : tok.tokens) {
            auto decoded = text::decode_utf8(t);
            for (char32_t c : decoded.text) {
                if (text::is_letter(c)) ++letters;
            }
            syllables += static_cast<std::size_t>(count_syllables(t));
            types.insert(t);
        }
        out[0] = static_cast<double>(letters) / n_tokens;
        out[1] = static_cast<double>(types.size()) / n_tokens;
        out[2] = n_tokens / static_cast<double>(tok.sentence_count);
        out[3] = static_cast<double>(syllables) / n_tokens;
    }
    if (tok.chars.total_chars > 0) {
        const double n_chars = static_cast<double>(tok.chars.total_chars);
        out[4] = static_cast<double>(tok.chars.punctuation_chars) / n_chars;
        out[5] = static_cast<double>(tok.chars.uppercase_chars) / n_chars;
        out[6] = static_cast<double>(tok.chars.digit_chars) / n_chars;
    }
    return out;
}

std::array<double, 2> readability_features(
    const Tokenized& tok, const std::unordered_set<std::string>& stopwords) {
    std::array<double, 2> out{};
    if (tok.tokens.empty()) return out;
    const double words = static_cast<double>(tok.tokens.size());
    const double sentences = static_cast<double>(tok.sentence_count);
    std::size_t syllables = 0;
    std::size_t stop_hits = 0;
    for (const auto& t : tok.tokens) {
        syllables += static_cast<std::size_t>(count_syllables(t));
        if (stopwords.count(t)) ++stop_hits;
    }
    out[0] = 206.835 - 1.015 * (words / sentences) -
             84.6 * (static_cast<double>(syllables) / words);
    out[1] = static_cast<double>(stop_hits) / words;
    return out;
}

std::array<double, 11> neologism_features(const std::vector<std::string>& tokens,
                                          const NeologismLexicon& lexicon) {
    std::array<double, 11> out{};
    std::unordered_set<std::string_view> uniq(tokens.begin(), tokens.end());
    std::size_t matched_total = 0;
    std::size_t matched_modern = 0;
    bool early_any = false;
    bool modern_any = false;
    for (std::size_t p = 0; p < lexicon.periods.size() && p < 8; ++p) {
        const LexiconPeriod& period = lexicon.periods[p];
        const bool is_modern = period.start_year >= lexicon.modern_cutoff_year;
        std::size_t hits = 0;
        for (const auto& tok : uniq) {
            if (period.words.count(std::string(tok))) ++hits;
        }
        if (hits > 0) {
            out[p] = 1.0;
            matched_total += hits;
            if (is_modern) {
                matched_modern += hits;
                modern_any = true;
            }
            if (period.end_year < lexicon.modern_cutoff_year) early_any = true;
        }
    }
    out[8] = early_any ? 1.0 : 0.0;
    out[9] = modern_any ? 1.0 : 0.0;
    out[10] = matched_total == 0 ? 0.0
                                 : static_cast<double>(matched_modern) /
                                       static_cast<double>(matched_total);
    return out;
}

std::array<double, kFunctionWordCount> distance_features(
    const std::vector<std::string>& tokens) {
    std::array<double, kFunctionWordCount> out{};
    const auto& targets = function_words();
    std::unordered_map<std::string_view, std::size_t> target_index;
    for (std::size_t i = 0; i < targets.size(); ++i) target_index[targets[i]] = i;

    struct Tracker {
        std::size_t last = 0;
        std::size_t occurrences = 0;
        std::size_t gap_sum = 0;
    };
    std::array<Tracker, kFunctionWordCount> trackers{};
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        auto it = target_index.find(tokens[pos]);
        if (it == target_index.end()) continue;
        Tracker& tr = trackers[it->second];
        if (tr.occurrences > 0) tr.gap_sum += pos - tr.last;
        tr.last = pos;
        ++tr.occurrences;
    }
    for (std::size_t i = 0; i < trackers.size(); ++i) {
        if (trackers[i].occurrences >= 2) {
            out[i] = static_cast<double>(trackers[i].gap_sum) /
                     static_cast<double>(trackers[i].occurrences - 1);
        }
    }
    return out;
}

std::array<double, 7> compression_features(const std::u32string& text,
                                           const markov::ContextModel& ref_order1,
                                           const markov::ContextModel& ref_order2,
                                           bool* degenerate) {
    std::array<double, 7> out{};
    if (text.size() < 3) {
        if (degenerate) *degenerate = true;
        return out;
    }
    if (degenerate) *degenerate = false;
    out[0] = markov::shannon_entropy(text);
    out[1] = markov::nrc(ref_order1, text);
    out[2] = markov::nrc(ref_order2, text);
    out[3] = markov::entropy_ratio(ref_order1, text);
    out[4] = markov::entropy_ratio(ref_order2, text);
    std::size_t distinct = 0;
    {
        std::u32string sorted = text;
        std::sort(sorted.begin(), sorted.end());
        distinct = static_cast<std::size_t>(
            std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    }
    const double alpha = 1.0 / static_cast<double>(distinct);
    out[5] = markov::compression_ratio(text, 1, alpha);
    out[6] = markov::compression_ratio(text, 2, alpha);
    return out;
}

void validate_lexicon(const NeologismLexicon& lexicon) {
    std::vector<std::string> problems;
    if (lexicon.periods.size() != kLexiconPeriodCount) {
        problems.push_back("expected " + std::to_string(kLexiconPeriodCount) +
                           " periods, got " + std::to_string(lexicon.periods.size()));
    }
    int expected_start = 1600;
    for (std::size_t p = 0; p < lexicon.periods.size(); ++p) {
        const LexiconPeriod& period = lexicon.periods[p];
        if (period.name.empty()) {
            problems.push_back("period " + std::to_string(p + 1) + " has no name");
        }
        if (period.start_year != expected_start) {
            problems.push_back("period " + period.name + " starts at " +
                               std::to_string(period.start_year) + ", expected " +
                               std::to_string(expected_start));
        }
        if (period.end_year < period.start_year) {
            problems.push_back("period " + period.name + " ends before it starts");
        }
        expected_start = period.end_year + 1;
        for (const auto& w : period.words) {
            bool ok = !w.empty();
            auto decoded = text::decode_utf8(w);
            for (char32_t c : decoded.text) {
                if (c == kApostrophe) continue;
                if (!text::is_letter(c) || text::to_lower(c) != c) ok = false;
            }
            if (!ok) {
                problems.push_back("period " + period.name + " word `" + w +
                                   "` is not a lowercase single token");
            }
        }
    }
    if (!lexicon.periods.empty() && lexicon.periods.back().end_year != 2020 &&
        problems.empty()) {
        problems.push_back("periods must cover 1600-2020; last ends at " +
                           std::to_string(lexicon.periods.back().end_year));
    }
    std::unordered_set<std::string> seen;
    for (const auto& period : lexicon.periods) {
        for (const auto& w : period.words) {
            if (!seen.insert(w).second) {
                problems.push_back("word `" + w + "` appears in more than one period");
            }
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid neologism lexicon:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

NeologismLexicon lexicon_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed lexicon JSON: ") + e.what());
    }
    NeologismLexicon lx;
    try {
        lx.modern_cutoff_year = j.value("modern_cutoff_year", 1900);
        for (const auto& pj : j.at("periods")) {
            LexiconPeriod period;
            period.name = pj.at("name").get<std::string>();
            period.start_year = pj.at("start_year").get<int>();
            period.end_year = pj.at("end_year").get<int>();
            for (const auto& w : pj.at("words")) {
                period.words.insert(w.get<std::string>());
            }
            lx.periods.push_back(std::move(period));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid lexicon JSON: ") + e.what());
    }
    validate_lexicon(lx);
    return lx;
}

NeologismLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open lexicon file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return lexicon_from_json(buf.str());
}

FeatureVector extract(const Document& doc, const ExtractionContext& ctx,
                      bool* degenerate) {
    if (!ctx.ref_order1 || !ctx.ref_order2) {
        throw ConfigError("extraction context is missing reference models");
    }
    const NeologismLexicon& lexicon = ctx.lexicon ? *ctx.lexicon : default_lexicon();
    const std::unordered_set<std::string>& stopwords =
        ctx.stopwords ? *ctx.stopwords : stopword_set();

    FeatureVector fv;
    fv.doc_id = doc.id;
    fv.year = doc.year;
    if (doc.year >= kMinYear && doc.year <= kMaxYear) {
        fv.century_class = LabelScale::century().label_of(doc.year);
        fv.decade_class = LabelScale::decade().label_of(doc.year);
    }

    auto decoded = text::decode_utf8(doc.text);
    bool degen = false;
    auto comp = compression_features(decoded.text, *ctx.ref_order1, *ctx.ref_order2,
                                     &degen);
    if (degenerate) *degenerate = degen;
    Tokenized tok = tokenize(decoded.text);
    auto lex = lexical_structure_features(tok);
    auto read = readability_features(tok, stopwords);
    auto neo = neologism_features(tok.tokens, lexicon);
    auto dist = distance_features(tok.tokens);

    std::size_t at = 0;
    for (double v : comp) fv.values[at++] = v;
    for (double v : lex) fv.values[at++] = v;
    for (double v : read) fv.values[at++] = v;
    for (double v : neo) fv.values[at++] = v;
    for (double v : dist) fv.values[at++] = v;
    return fv;
}

std::vector<FeatureVector> extract_all(const std::vector<Document>& docs,
                                       const ExtractionContext& ctx, int workers,
                                       ExtractionReport* report) {
    std::vector<FeatureVector> out(docs.size());
    std::vector<char> degen_flags(docs.size(), 0);
    const std::size_t n = docs.size();
    std::size_t n_workers = workers < 1 ? 1 : static_cast<std::size_t>(workers);
    if (n_workers > n) n_workers = n == 0 ? 1 : n;

    const auto run_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            bool degen = false;
            out[i] = extract(docs[i], ctx, &degen);
            degen_flags[i] = degen ? 1 : 0;
        }
    };
    if (n_workers <= 1) {
        run_block(0, n);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            const std::size_t begin = n * w / n_workers;
            const std::size_t end = n * (w + 1) / n_workers;
            threads.emplace_back(run_block, begin, end);
        }
        for (auto& t : threads) t.join();
    }
    if (report) {
        report->documents = n;
        report->degenerate_compression = 0;
        report->empty_documents = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (degen_flags[i]) ++report->degenerate_compression;
            if (docs[i].text.empty()) ++report->empty_documents;
        }
    }
    return out;
}

namespace {

std::string format_value(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string features_csv_header() {
    std::string h = "doc_id,year,century_class,decade_class";
    for (const auto& name : feature_names()) {
        h += ',';
        h += name;
    }
    h += '\n';
    return h;
}

std::string features_csv_row(const FeatureVector& row) {
    std::string line = row.doc_id;
    line += ',';
    line += std::to_string(row.year);
    line += ',';
    line += std::to_string(row.century_class);
    line += ',';
    line += std::to_string(row.decade_class);
    for (double v : row.values) {
        line += ',';
        line += format_value(v);
    }
    line += '\n';
    return line;
}

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureVector>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write features CSV: " + path.string());
    out << features_csv_header();
    for (const auto& row : rows) out << features_csv_row(row);
    if (!out) throw DataError("failed writing features CSV: " + path.string());
}

std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open features CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty features CSV: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string expected = features_csv_header();
    expected.pop_back();
    if (line != expected) {
        throw ModelError("features CSV header does not match schema " +
                         std::string(kSchemaVersion) + ": " + path.string());
    }
    std::vector<FeatureVector> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 4 + kFeatureCount) {
            throw DataError("features CSV line " + std::to_string(line_no) +
                            " has " + std::to_string(fields.size()) + " fields");
        }
        FeatureVector fv;
        fv.doc_id = fields[0];
        try {
            fv.year = std::stoi(fields[1]);
            fv.century_class = std::stoi(fields[2]);
            fv.decade_class = std::stoi(fields[3]);
            for (std::size_t i = 0; i < kFeatureCount; ++i) {
                fv.values[i] = std::stod(fields[4 + i]);
            }
        } catch (const std::exception&) {
            throw DataError("features CSV line " + std::to_string(line_no) +
                            " has a malformed number");
        }
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace tempora::features
