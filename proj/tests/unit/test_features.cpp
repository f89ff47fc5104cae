#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "synthetic.hpp"
#include "tempora/errors.hpp"
#include "tempora/features.hpp"
#include "tempora/markov.hpp"
#include "tempora/rng.hpp"
#include "tempora/text.hpp"

using namespace tempora;
using namespace tempora::features;

namespace {

markov::ContextModel uniform_reference(const std::vector<char32_t>& symbols,
                                       int order) {
    auto alphabet = markov::Alphabet::from_symbols(symbols, markov::OovPolicy::clamp,
                                                   false);
    std::u32string tiny(symbols.begin(), symbols.end());
    return markov::fit_reference({tiny + tiny + tiny}, order, 1e12, alphabet);
}

ExtractionContext context_for(const markov::ContextModel& o1,
                              const markov::ContextModel& o2) {
    ExtractionContext ctx;
    ctx.ref_order1 = &o1;
    ctx.ref_order2 = &o2;
    return ctx;
}

}  // namespace

TEST_CASE("the schema is fixed at 44 named columns") {
    const auto& names = feature_names();
    REQUIRE(names.size() == kFeatureCount);
    CHECK(names.front() == "shannon_entropy");
    CHECK(names[7] == "avg_word_length");
    CHECK(names[14] == "flesch_reading_ease");
    CHECK(names[16] == "neo_period_1");
    CHECK(names[26] == "neo_vocabulary_modernity");
    CHECK(names[27] == "dist_at");
    CHECK(names.back() == "dist_it");
    CHECK(feature_index("nrc_o2") == 2);
    CHECK(feature_index("no_such_feature") == -1);
    CHECK(feature_domain(0) == Domain::compression);
    CHECK(feature_domain(6) == Domain::compression);
    CHECK(feature_domain(7) == Domain::lexical_structure);
    CHECK(feature_domain(14) == Domain::readability);
    CHECK(feature_domain(16) == Domain::neologism);
    CHECK(feature_domain(27) == Domain::distance);
    CHECK(feature_domain(43) == Domain::distance);
}

TEST_CASE("tokenize lowercases letter runs and counts sentences") {
    const auto tok = tokenize(U"The cat sat.");
    REQUIRE(tok.tokens == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tok.sentence_count == 1);
    CHECK(tok.chars.total_chars == 12);
    CHECK(tok.chars.punctuation_chars == 1);
    CHECK(tok.chars.uppercase_chars == 1);
    CHECK(tok.chars.digit_chars == 0);
}

TEST_CASE("apostrophes survive only between letters") {
    CHECK(tokenize(U"Don't stop").tokens ==
          std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize(U"don’t").tokens == std::vector<std::string>{"don't"});
    CHECK(tokenize(U"the cats' tails").tokens ==
          std::vector<std::string>{"the", "cats", "tails"});
    CHECK(tokenize(U"'tis o'clock").tokens ==
          std::vector<std::string>{"tis", "o'clock"});
}

TEST_CASE("terminator runs close one sentence and bare text counts as one") {
    CHECK(tokenize(U"Stop!! Now.").sentence_count == 2);
    CHECK(tokenize(U"What?!").sentence_count == 1);
    CHECK(tokenize(U"hello world").sentence_count == 1);
    const auto empty = tokenize(U"");
    CHECK(empty.tokens.empty());
    CHECK(empty.sentence_count == 0);
    CHECK(empty.chars.total_chars == 0);
}

TEST_CASE("syllable counts follow the vowel-group rule") {
    CHECK(count_syllables("cat") == 1);
    CHECK(count_syllables("table") == 2);
    CHECK(count_syllables("idea") == 2);
    CHECK(count_syllables("the") == 1);
    CHECK(count_syllables("queue") == 1);
    CHECK(count_syllables("syzygy") == 3);
    CHECK(count_syllables("strength") == 1);
    CHECK(count_syllables("x") == 1);
    // Terminal e drops only when more than two groups remain beforehand.
    CHECK(count_syllables("telephone") == 3);
    CHECK(count_syllables("here") == 2);
    CHECK(count_syllables("sunshine") == 2);
}

TEST_CASE("lexical structure of a tiny sentence") {
    const auto tok = tokenize(U"The cat sat.");
    const auto lex = lexical_structure_features(tok);
    CHECK(lex[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lex[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lex[2] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lex[3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lex[4] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(lex[5] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(lex[6] == 0.0);
}

TEST_CASE("repeated words lower lexical richness") {
    const auto lex = lexical_structure_features(tokenize(U"the cat the dog"));
    CHECK(lex[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("digit ratio counts digit characters") {
    const auto lex = lexical_structure_features(tokenize(U"a1b2"));
    CHECK(lex[6] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty input zeroes every lexical value") {
    const auto lex = lexical_structure_features(tokenize(U""));
    for (double v : lex) CHECK(v == 0.0);
}

TEST_CASE("Flesch reading ease of a one-syllable sentence") {
    const auto read = readability_features(tokenize(U"The cat sat."), stopword_set());
    CHECK(std::abs(read[0] - 119.19) <= 0.01);
}

TEST_CASE("stopword ratio counts pinned function words") {
    const auto read = readability_features(tokenize(U"the cat sat on the mat"),
                                           stopword_set());
    CHECK(read[1] == doctest::Approx(0.5).epsilon(1e-12));
    const auto none = readability_features(tokenize(U""), stopword_set());
    CHECK(none[0] == 0.0);
    CHECK(none[1] == 0.0);
}

TEST_CASE("neologism features are all zero without lexicon hits") {
    const auto neo = neologism_features({"plain", "words", "only"}, default_lexicon());
    for (double v : neo) CHECK(v == 0.0);
}

TEST_CASE("a single early-period hit sets its flag and zero modernity") {
    const auto neo = neologism_features({"the", "telegraph", "hummed"},
                                        default_lexicon());
    CHECK(neo[0] == 0.0);
    CHECK(neo[1] == 0.0);
    CHECK(neo[2] == 1.0);  // 1800-1849
    CHECK(neo[3] == 0.0);
    CHECK(neo[8] == 1.0);  // some pre-1900 period matched
    CHECK(neo[9] == 0.0);
    CHECK(neo[10] == 0.0);
}

TEST_CASE("modernity balances early against modern vocabulary") {
    const auto neo = neologism_features({"telegraph", "laser"}, default_lexicon());
    CHECK(neo[2] == 1.0);
    CHECK(neo[5] == 1.0);  // 1950-1979
    CHECK(neo[8] == 1.0);
    CHECK(neo[9] == 1.0);
    CHECK(neo[10] == doctest::Approx(0.5).epsilon(1e-12));
    // Duplicate tokens count once: still one early and one modern type.
    const auto dup = neologism_features({"telegraph", "telegraph", "laser"},
                                        default_lexicon());
    CHECK(dup[10] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("distance features average the gaps between occurrences") {
    const auto dist = distance_features({"on", "the", "mat", "on", "the", "rug"});
    CHECK(dist[5] == doctest::Approx(3.0).epsilon(1e-12));  // on
    CHECK(dist[8] == doctest::Approx(3.0).epsilon(1e-12));  // the
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i != 5 && i != 8) CHECK(dist[i] == 0.0);
    }
    const auto single = distance_features({"of", "stone"});
    CHECK(single[4] == 0.0);
    const auto spread = distance_features({"a", "x", "a", "x", "a"});
    CHECK(spread[9] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compression features degenerate below three characters") {
    const auto o1 = uniform_reference({U'a', U'b'}, 1);
    const auto o2 = uniform_reference({U'a', U'b'}, 2);
    bool degenerate = false;
    const auto comp = compression_features(U"ab", o1, o2, &degenerate);
    CHECK(degenerate);
    for (double v : comp) CHECK(v == 0.0);
    compression_features(U"aba", o1, o2, &degenerate);
    CHECK(!degenerate);
}

TEST_CASE("a constant text has zero entropy and free self-compression") {
    const auto o1 = uniform_reference({U'a', U'b'}, 1);
    const auto o2 = uniform_reference({U'a', U'b'}, 2);
    const auto comp = compression_features(std::u32string(64, U'a'), o1, o2, nullptr);
    CHECK(comp[0] == 0.0);
    CHECK(comp[3] == 1.0);
    CHECK(comp[4] == 1.0);
    CHECK(comp[5] == 0.0);
    CHECK(comp[6] == 0.0);
}

TEST_CASE("uniform references price uniform noise at an NRC of one") {
    std::vector<char32_t> symbols;
    for (int i = 0; i < 64; ++i) symbols.push_back(static_cast<char32_t>(U'0' + i));
    const auto o1 = uniform_reference(symbols, 1);
    const auto o2 = uniform_reference(symbols, 2);
    Rng rng(4242);
    std::u32string text;
    for (int i = 0; i < 4096; ++i) {
        text.push_back(static_cast<char32_t>(U'0' + rng.uniform_below(64)));
    }
    const auto comp = compression_features(text, o1, o2, nullptr);
    CHECK(comp[1] == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(comp[2] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("every feature stays inside its documented range") {
    const auto [o1, o2] = testsupport::golden_fixture_references();
    const auto ctx = context_for(o1, o2);
    Rng rng(99);
    auto src = testsupport::make_source(
        {U'a', U'e', U'n', U'o', U'r', U's', U't', U' '}, 3, 0.5);
    for (int trial = 0; trial < 40; ++trial) {
        Document doc;
        doc.id = "r" + std::to_string(trial);
        doc.year = 1600 + static_cast<int>(rng.uniform_below(430));
        doc.text = text::encode_utf8(
            testsupport::sample_text(src, 40 + rng.uniform_below(400), rng));
        const auto fv = extract(doc, ctx);
        const auto& v = fv.values;
        CHECK(v[0] >= 0.0);
        for (int i : {1, 2, 3, 4, 5, 6}) CHECK(v[i] >= 0.0);
        CHECK(v[7] >= 0.0);
        if (v[8] != 0.0) {
            CHECK(v[8] > 0.0);
            CHECK(v[8] <= 1.0);
        }
        CHECK(v[9] >= 0.0);
        CHECK(v[10] >= 0.0);
        for (int i : {11, 12, 13, 15}) {
            CHECK(v[i] >= 0.0);
            CHECK(v[i] <= 1.0);
        }
        CHECK(v[14] >= -400.0);
        CHECK(v[14] <= 206.835 + 1.0);
        for (int i = 16; i <= 25; ++i) CHECK((v[i] == 0.0 || v[i] == 1.0));
        CHECK(v[26] >= 0.0);
        CHECK(v[26] <= 1.0);
        for (int i = 27; i < 44; ++i) CHECK(v[i] >= 0.0);
    }
}

TEST_CASE("sentence length times sentence count recovers the token count") {
    Rng rng(7);
    auto src = testsupport::make_source({U'a', U'b', U'c', U' ', U'.'}, 5, 0.4);
    for (int trial = 0; trial < 25; ++trial) {
        const auto text = testsupport::sample_text(src, 60 + rng.uniform_below(300),
                                                   rng);
        const auto tok = tokenize(text);
        if (tok.tokens.empty()) continue;
        const auto lex = lexical_structure_features(tok);
        CHECK(lex[2] * static_cast<double>(tok.sentence_count) ==
              doctest::Approx(static_cast<double>(tok.tokens.size())).epsilon(1e-9));
    }
}

TEST_CASE("extract labels rows from the document year") {
    const auto [o1, o2] = testsupport::golden_fixture_references();
    const auto ctx = context_for(o1, o2);
    Document doc;
    doc.id = "d1";
    doc.year = 1787;
    doc.text = "A plain sentence for the extractor.";
    const auto fv = extract(doc, ctx);
    CHECK(fv.doc_id == "d1");
    CHECK(fv.year == 1787);
    CHECK(fv.century_class == 1);
    CHECK(fv.decade_class == 18);

    Document unlabeled = doc;
    unlabeled.year = 0;
    const auto fu = extract(unlabeled, ctx);
    CHECK(fu.century_class == -1);
    CHECK(fu.decade_class == -1);
}

TEST_CASE("extract demands reference models") {
    ExtractionContext ctx;
    Document doc;
    doc.id = "d";
    doc.text = "words";
    CHECK_THROWS_AS(extract(doc, ctx), ConfigError);
}

TEST_CASE("worker counts never change extraction output") {
    const auto [o1, o2] = testsupport::golden_fixture_references();
    const auto ctx = context_for(o1, o2);
    const auto docs = testsupport::golden_fixture_documents();
    ExtractionReport rep1;
    const auto rows1 = extract_all(docs, ctx, 1, &rep1);
    ExtractionReport rep4;
    const auto rows4 = extract_all(docs, ctx, 4, &rep4);
    ExtractionReport rep8;
    const auto rows8 = extract_all(docs, ctx, 8, &rep8);
    REQUIRE(rows1.size() == docs.size());
    REQUIRE(rows4.size() == docs.size());
    REQUIRE(rows8.size() == docs.size());
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].doc_id == docs[i].id);
        CHECK(rows1[i].doc_id == rows4[i].doc_id);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            CHECK(rows1[i].values[f] == rows4[i].values[f]);
            CHECK(rows1[i].values[f] == rows8[i].values[f]);
        }
    }
    CHECK(rep1.documents == docs.size());
    CHECK(rep1.documents == rep4.documents);
    CHECK(rep1.degenerate_compression == rep4.degenerate_compression);
    CHECK(rep1.empty_documents == rep4.empty_documents);
    CHECK(rep1.degenerate_compression >= 2);  // empty and single-char fixtures
    CHECK(rep1.empty_documents == 1);
}

TEST_CASE("feature CSV round-trips through disk") {
    testsupport::ScratchDir dir("features_csv");
    const auto [o1, o2] = testsupport::golden_fixture_references();
    const auto rows = extract_all(testsupport::golden_fixture_documents(),
                                  context_for(o1, o2), 2, nullptr);
    const auto path = dir.path() / "rows.csv";
    write_features_csv(path, rows);

    std::ifstream in(path, std::ios::binary);
    std::string header;
    std::getline(in, header);
    CHECK(header == std::string("doc_id,year,century_class,decade_class,") +
                        "shannon_entropy,nrc_o1,nrc_o2,entropy_ratio_o1,"
                        "entropy_ratio_o2,compression_ratio_o1,compression_ratio_o2,"
                        "avg_word_length,lexical_richness,avg_sentence_length,"
                        "syllables_per_word,punctuation_density,uppercase_ratio,"
                        "digit_ratio,flesch_reading_ease,stopword_ratio,"
                        "neo_period_1,neo_period_2,neo_period_3,neo_period_4,"
                        "neo_period_5,neo_period_6,neo_period_7,neo_period_8,"
                        "neo_early_era_any,neo_modern_era_any,"
                        "neo_vocabulary_modernity,dist_at,dist_by,dist_for,dist_in,"
                        "dist_of,dist_on,dist_to,dist_with,dist_the,dist_a,dist_an,"
                        "dist_is,dist_was,dist_and,dist_as,dist_that,dist_it");

    const auto back = read_features_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].doc_id == rows[i].doc_id);
        CHECK(back[i].year == rows[i].year);
        CHECK(back[i].century_class == rows[i].century_class);
        CHECK(back[i].decade_class == rows[i].decade_class);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            CHECK(back[i].values[f] ==
                  doctest::Approx(rows[i].values[f]).epsilon(1e-8));
        }
    }
}

TEST_CASE("feature CSV rejects foreign headers and malformed rows") {
    testsupport::ScratchDir dir("features_bad");
    const auto bad_header = dir.path() / "bad_header.csv";
    {
        std::ofstream out(bad_header, std::ios::binary);
        out << "id,year,label\nx,1900,3\n";
    }
    CHECK_THROWS_AS(read_features_csv(bad_header), ModelError);

    const auto bad_row = dir.path() / "bad_row.csv";
    {
        std::ofstream out(bad_row, std::ios::binary);
        out << features_csv_header();
        out << "doc,1900,3,30,not_a_number\n";
    }
    CHECK_THROWS_AS(read_features_csv(bad_row), DataError);
    CHECK_THROWS_AS(read_features_csv(dir.path() / "absent.csv"), DataError);
}

TEST_CASE("values are written with nine significant digits and LF endings") {
    FeatureVector fv;
    fv.doc_id = "x";
    fv.year = 1900;
    fv.century_class = 3;
    fv.decade_class = 30;
    fv.values[0] = 1.0 / 3.0;
    const auto line = features_csv_row(fv);
    CHECK(line.find("0.333333333") != std::string::npos);
    CHECK(line.find('\r') == std::string::npos);
    CHECK(line.back() == '\n');
}

TEST_CASE("the default lexicon passes its own validation") {
    CHECK_NOTHROW(validate_lexicon(default_lexicon()));
    CHECK(default_lexicon().periods.size() == kLexiconPeriodCount);
    CHECK(default_lexicon().periods.front().start_year == 1600);
    CHECK(default_lexicon().periods.back().end_year == 2020);
}

TEST_CASE("lexicon validation rejects structural violations") {
    NeologismLexicon lx = default_lexicon();
    lx.periods.pop_back();
    CHECK_THROWS_AS(validate_lexicon(lx), ConfigError);

    NeologismLexicon overlap = default_lexicon();
    overlap.periods[1].words.insert("telescope");  // already in period 1
    CHECK_THROWS_AS(validate_lexicon(overlap), ConfigError);

    NeologismLexicon gap = default_lexicon();
    gap.periods[2].start_year = 1801;
    CHECK_THROWS_AS(validate_lexicon(gap), ConfigError);

    NeologismLexicon cased = default_lexicon();
    cased.periods[0].words.insert("Telescope");
    CHECK_THROWS_AS(validate_lexicon(cased), ConfigError);
}

TEST_CASE("lexicons load from JSON and reject malformed input") {
    testsupport::ScratchDir dir("lexicon_io");
    std::string json = R"({"modern_cutoff_year": 1900, "periods": [)";
    const auto& periods = default_lexicon().periods;
    for (std::size_t p = 0; p < periods.size(); ++p) {
        if (p) json += ",";
        json += R"({"name": ")" + periods[p].name + R"(", "start_year": )" +
                std::to_string(periods[p].start_year) + R"(, "end_year": )" +
                std::to_string(periods[p].end_year) + R"(, "words": [)";
        bool first = true;
        for (const auto& w : periods[p].words) {
            if (!first) json += ",";
            json += "\"" + w + "\"";
            first = false;
        }
        json += "]}";
    }
    json += "]}";
    const auto lx = lexicon_from_json(json);
    CHECK(lx.periods.size() == kLexiconPeriodCount);
    CHECK(lx.periods[3].words.count("telephone") == 1);

    CHECK_THROWS_AS(lexicon_from_json("{"), ConfigError);
    CHECK_THROWS_AS(lexicon_from_json(R"({"periods": 3})"), ConfigError);
    CHECK_THROWS_AS(load_lexicon(dir.path() / "missing.json"), ConfigError);

    const auto path = dir.path() / "lexicon.json";
    {
        std::ofstream out(path, std::ios::binary);
        out << json;
    }
    CHECK(load_lexicon(path).periods.size() == kLexiconPeriodCount);
}

TEST_CASE("stopword list holds exactly the pinned 175 words") {
    CHECK(stopword_set().size() == 175);
    CHECK(stopword_set().count("the") == 1);
    CHECK(stopword_set().count("whether") == 1);
    CHECK(stopword_set().count("cat") == 0);
}
