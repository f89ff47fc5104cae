#include "synthetic.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tempora/text.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using tempora::Rng;

ScratchDir::ScratchDir(const std::string& name) {
    path_ = fs::temp_directory_path() /
            ("tempora_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Order1Source make_source(const std::vector<char32_t>& alphabet,
                         std::uint64_t perm_seed, double bias) {
    Order1Source src;
    src.alphabet = alphabet;
    src.bias = bias;
    Rng rng(perm_seed);
    src.preferred = rng.permutation(alphabet.size());
    return src;
}

std::u32string sample_text(const Order1Source& source, std::size_t length,
                           tempora::Rng& rng) {
    const std::size_t m = source.alphabet.size();
    std::u32string out;
    out.reserve(length);
    std::size_t cur = rng.uniform_below(m);
    out.push_back(source.alphabet[cur]);
    while (out.size() < length) {
        cur = rng.next_double() < source.bias ? source.preferred[cur]
                                              : rng.uniform_below(m);
        out.push_back(source.alphabet[cur]);
    }
    return out;
}

namespace {

const std::vector<char32_t> kConsonants = {U'b', U'c', U'd', U'f', U'g', U'h', U'k',
                                           U'l', U'm', U'n', U'p', U'r', U's', U't'};

struct Style {
    Order1Source source;
    std::vector<std::string> era_words;
    std::size_t the_cadence = 4;
    std::size_t of_cadence = 9;
};

std::string emit_document(Rng& rng, const Style& style, std::size_t n_tokens) {
    std::vector<std::string> tokens;
    tokens.reserve(n_tokens + n_tokens / 3);
    std::size_t since_the = 0, since_of = 0, since_era = 0, era_i = 0;
    while (tokens.size() < n_tokens) {
        const std::size_t len = 3 + rng.uniform_below(5);
        tokens.push_back(tempora::text::encode_utf8(
            sample_text(style.source, len, rng)));
        if (++since_era == 20) {
            tokens.push_back(style.era_words[era_i++ % style.era_words.size()]);
            since_era = 0;
        }
        if (++since_the == style.the_cadence) {
            tokens.push_back("the");
            since_the = 0;
        }
        if (++since_of == style.of_cadence) {
            tokens.push_back("of");
            since_of = 0;
        }
    }

    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string tok = tokens[i];
        if (i % 9 == 0) {
            tok[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
            if (i > 0) text += ".";
        }
        if (i > 0) text += " ";
        text += tok;
    }
    text += ".\n";
    return text;
}

GeneratedCorpus write_corpus_files(const fs::path& dir,
                                   const std::vector<std::string>& texts,
                                   const std::vector<int>& years) {
    fs::create_directories(dir / "texts");
    GeneratedCorpus out;
    out.years = years;
    std::string manifest = "id,path,year,source\n";
    for (std::size_t i = 0; i < texts.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "doc%04zu", i);
        out.ids.push_back(id);
        const std::string rel = std::string("texts/") + id + ".txt";
        std::ofstream f(dir / rel, std::ios::binary);
        f << texts[i];
        manifest += std::string(id) + "," + rel + "," + std::to_string(years[i]) +
                    ",synthetic\n";
    }
    out.manifest = dir / "manifest.csv";
    std::ofstream mf(out.manifest, std::ios::binary);
    mf << manifest;
    return out;
}

}  // namespace

GeneratedCorpus write_planted_corpus(const fs::path& dir, std::size_t docs_per_class,
                                     std::uint64_t seed) {
    const std::vector<std::vector<std::string>> era_words = {
        {"telescope", "gravity", "musket", "colony", "quill"},
        {"oxygen", "piano", "parachute", "caucus", "guillotine"},
        {"telephone", "bicycle", "dynamite", "telegram", "elevator"},
        {"laser", "transistor", "software", "pixel", "modem"},
        {"smartphone", "podcast", "selfie", "hashtag", "emoji"},
    };
    const double biases[5] = {0.30, 0.42, 0.54, 0.66, 0.78};

    Rng rng(seed);
    std::vector<std::string> texts;
    std::vector<int> years;
    for (std::size_t c = 0; c < 5; ++c) {
        Style style;
        style.source = make_source(kConsonants, 101 + c, biases[c]);
        style.era_words = era_words[c];
        style.the_cadence = 3 + c;
        style.of_cadence = 11 - c;
        for (std::size_t d = 0; d < docs_per_class; ++d) {
            const std::size_t n_tokens = 160 + rng.uniform_below(80);
            texts.push_back(emit_document(rng, style, n_tokens));
            const int span = c == 4 ? 30 : 100;
            years.push_back(1600 + static_cast<int>(c) * 100 +
                            static_cast<int>(rng.uniform_below(span)));
        }
    }
    return write_corpus_files(dir, texts, years);
}

GeneratedCorpus write_changepoint_corpus(const fs::path& dir, int change_year,
                                         std::size_t n_docs, std::uint64_t seed) {
    Style early;
    early.source = make_source(kConsonants, 7, 0.35);
    early.era_words = {"telescope", "musket", "quill", "gravity", "colony"};
    early.the_cadence = 4;
    early.of_cadence = 9;
    Style late;
    late.source = make_source(kConsonants, 19, 0.70);
    late.era_words = {"laser", "software", "pixel", "modem", "transistor"};
    late.the_cadence = 7;
    late.of_cadence = 12;

    Rng rng(seed);
    std::vector<std::string> texts;
    std::vector<int> years;
    for (std::size_t i = 0; i < n_docs; ++i) {
        const int decade = change_year - 80 + 10 * static_cast<int>(i % 16);
        const int year = decade + static_cast<int>(rng.uniform_below(10));
        const Style& style = year < change_year ? early : late;
        const std::size_t n_tokens = 140 + rng.uniform_below(60);
        texts.push_back(emit_document(rng, style, n_tokens));
        years.push_back(year);
    }
    return write_corpus_files(dir, texts, years);
}

std::vector<tempora::Document> golden_fixture_documents() {
    struct Raw {
        const char* id;
        int year;
        const char* text;
    };
    static const Raw raws[] = {
        {"g01_empty", 1700, ""},
        {"g02_single_char", 1850, "a"},
        {"g03_marker_wrapped", 1861,
         "Old Tales and Rivers, by Nobody in Particular\r\n"
         "\r\n"
         "This text is offered to anyone anywhere at no cost.\r\n"
         "\r\n"
         "*** START OF THE EBOOK OLD TALES AND RIVERS ***\r\n"
         "\r\n"
         "The fog had settled upon the river by four o'clock, and the lamps\r\n"
         "of the old bridge burned like small moons in a grey sea.\t Mr.\r\n"
         "Harwick drew his coat about him and counted the strokes of the\r\n"
         "hour.\r\n"
         "\r\n"
         "\r\n"
         "\r\n"
         "Nobody crossed at that hour; nobody had crossed for years.\r\n"
         "\r\n"
         "*** END OF THE EBOOK OLD TALES AND RIVERS ***\r\n"
         "\r\n"
         "Further notes about this file follow here.\r\n"},
        {"g04_modern", 2010,
         "The podcast appeared on her smartphone before breakfast. A selfie, "
         "a hashtag, and one emoji later, the whole office had seen it. "
         "Nobody writes letters anymore, she thought; the livestream is the "
         "diary now."},
        {"g05_early_modern", 1650,
         "Through his telescope the astronomer beheld the moons of Jupiter, "
         "and wrote of gravity in his almanack. A musket stood by the door; "
         "a quill lay upon the parchment; the colony slept."},
        {"g06_numbers", 1900,
         "Report No. 47 (1899): of 200 samples, 45% failed!? The 2nd batch "
         "-- marked \"B\" -- cost $3.50; the 3rd, $1.25. Totals: 112 good, "
         "88 bad."},
        {"g07_accents", 1920,
         "Ça va, dit-elle — naïve question! Der Käufer zahlte 300 Francs "
         "für das alte Buch. Ὁ δὲ ποιητὴς ᾖδε καλῶς. Она читала письмо у "
         "окна."},
        {"g08_whitespace", 1790,
         "Upon\tthe    morning of the fourth day,\r\n"
         "the wind fell away entirely.\r\n"
         "\r\n"
         "\r\n"
         "\r\n"
         "The ship lay still;  her sails hung\tslack as linen on a line.\r\n"
         "No bird rose from the water.\r\n"},
        {"g09_apostrophes", 1870,
         "Don't stop now, said the boatman; 'tis the cats' hour, and the "
         "o'clock bells won't wait. We'd rather the fo'c'sle stayed shut "
         "'til dawn."},
        {"g10_repetition", 1955,
         "The machine hummed the same six notes. The machine hummed the "
         "same six notes. The machine hummed the same six notes. The "
         "machine hummed the same six notes. The machine hummed the same "
         "six notes."},
    };

    std::vector<tempora::Document> docs;
    for (const auto& raw : raws) {
        tempora::Document d;
        d.id = raw.id;
        d.year = raw.year;
        d.source = tempora::Source::synthetic;
        d.text = tempora::corpus::normalize(tempora::corpus::strip_boilerplate(raw.text));
        docs.push_back(std::move(d));
    }
    return docs;
}

std::pair<tempora::markov::ContextModel, tempora::markov::ContextModel>
golden_fixture_references() {
    namespace mk = tempora::markov;
    std::vector<std::u32string> texts;
    for (const auto& d : golden_fixture_documents()) {
        if (!d.text.empty()) texts.push_back(tempora::text::decode_utf8(d.text).text);
    }
    auto alphabet = mk::Alphabet::build(texts, mk::OovPolicy::escape_symbol);
    const double alpha = 1.0 / static_cast<double>(alphabet.size());
    return {mk::fit_reference(texts, 1, alpha, alphabet),
            mk::fit_reference(texts, 2, alpha, alphabet)};
}

}  // namespace testsupport
