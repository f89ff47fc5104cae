#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "synthetic.hpp"
#include "tempora/corpus.hpp"
#include "tempora/errors.hpp"

using namespace tempora;

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

}  // namespace

TEST_CASE("boilerplate markers are stripped with surrounding junk") {
    const std::string raw =
        "Some library preamble\n"
        "*** START OF THE EBOOK WHATEVER ***\n"
        "Actual first line.\n"
        "Actual second line.\n"
        "*** END OF THE EBOOK WHATEVER ***\n"
        "License text follows.\n";
    const std::string body = corpus::strip_boilerplate(raw);
    CHECK(body.find("Actual first line.") != std::string::npos);
    CHECK(body.find("preamble") == std::string::npos);
    CHECK(body.find("License") == std::string::npos);
    CHECK(corpus::strip_boilerplate(body) == body);
}

TEST_CASE("marker matching is case-insensitive and picks the outermost pair") {
    const std::string raw =
        "*** start of the ebook ***\n"
        "early mention of *** START OF something inside? no: last wins\n"
        "body\n"
        "*** end of the ebook ***\n"
        "tail\n"
        "*** END OF THE EBOOK AGAIN ***\n";
    // Cut after the LAST start line and before the FIRST end line.
    const std::string body = corpus::strip_boilerplate(raw);
    CHECK(body.find("body") != std::string::npos);
    CHECK(body.find("tail") == std::string::npos);
    CHECK(body.find("start of") == std::string::npos);
}

TEST_CASE("text without markers passes through unchanged") {
    const std::string raw = "Nothing to see here.\nJust text.\n";
    CHECK(corpus::strip_boilerplate(raw) == raw);
}

TEST_CASE("crossed markers leave nothing") {
    const std::string raw =
        "*** END OF THE EBOOK ***\n"
        "ghost text\n"
        "*** START OF THE EBOOK ***\n";
    CHECK(corpus::strip_boilerplate(raw).empty());
}

TEST_CASE("normalize canonicalizes whitespace and is idempotent") {
    const std::string raw = "  a\tb   c\r\nd\r\re\n\n\n\nf  ";
    const std::string once = corpus::normalize(raw);
    CHECK(once == "a b c\nd\n\ne\n\nf");
    CHECK(corpus::normalize(once) == once);
}

TEST_CASE("normalize keeps casing and punctuation") {
    CHECK(corpus::normalize("Hello,   World!") == "Hello, World!");
}

TEST_CASE("century scale maps 1600-2029 onto five classes") {
    const auto scale = LabelScale::century();
    CHECK(scale.n_classes() == 5);
    CHECK(scale.label_of(1600) == 0);
    CHECK(scale.label_of(1699) == 0);
    CHECK(scale.label_of(1700) == 1);
    CHECK(scale.label_of(1999) == 3);
    CHECK(scale.label_of(2000) == 4);
    CHECK(scale.label_of(2029) == 4);
    CHECK(scale.class_name(0) == "17th century");
    CHECK(scale.class_name(4) == "21st century");
    CHECK(scale.describe() == "century");
}

TEST_CASE("decade scale has 43 classes named by decade start") {
    const auto scale = LabelScale::decade();
    CHECK(scale.n_classes() == 43);
    CHECK(scale.label_of(1600) == 0);
    CHECK(scale.label_of(1955) == 35);
    CHECK(scale.label_of(2029) == 42);
    CHECK(scale.class_name(35) == "1950s");
}

TEST_CASE("binary scale validates its threshold and splits on it") {
    CHECK_THROWS_AS(LabelScale::binary(1905), ConfigError);
    const auto scale = LabelScale::binary(1900);
    CHECK(scale.n_classes() == 2);
    CHECK(scale.label_of(1899) == 0);
    CHECK(scale.label_of(1900) == 1);
    CHECK(scale.class_name(0) == "old");
    CHECK(scale.class_name(1) == "new");
    CHECK(scale.describe() == "binary@1900");
}

TEST_CASE("source and task names round-trip") {
    CHECK(source_from_string("gutenberg") == Source::gutenberg);
    CHECK(std::string(to_string(Source::open_library)) == "open_library");
    CHECK(!source_from_string("mystery").has_value());
    CHECK(task_from_string("decade") == TaskKind::decade);
    CHECK(!task_from_string("week").has_value());
}

TEST_CASE("load_corpus reads files, cleans them, and records skips") {
    testsupport::ScratchDir dir("load_corpus");
    write_text(dir.path() / "good.txt", "Hello there, general reader.\n");
    write_text(dir.path() / "empty.txt", "   \n\n  ");
    write_text(dir.path() / "mojibake.txt", "caf\xE9 latte");

    write_text(dir.path() / "manifest.csv",
               "id,path,year,source\n"
               "good,good.txt,1850,gutenberg\n"
               "good,good.txt,1850,gutenberg\n"
               "early,good.txt,1599,gutenberg\n"
               "late,good.txt,2030,gutenberg\n"
               "nonnum,good.txt,abcd,gutenberg\n"
               "weird,good.txt,1850,carved_in_stone\n"
               "missing,nope.txt,1850,gutenberg\n"
               "blank,empty.txt,1850,gutenberg\n"
               "short,good.txt,1850\n"
               "moji,mojibake.txt,1950,other\n");

    corpus::IngestionReport report;
    std::vector<corpus::ManifestRow> rows;
    const auto docs = corpus::load_corpus(dir.path() / "manifest.csv", &report, &rows);

    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "good");
    CHECK(docs[0].text == "Hello there, general reader.");
    CHECK(docs[1].id == "moji");
    CHECK(report.loaded == 2);
    CHECK(report.replacement_char_count == 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].path.is_absolute());

    std::map<std::string, std::string> reasons;
    for (const auto& s : report.skipped) reasons[s.id] = s.reason;
    CHECK(reasons.size() == 8);
    CHECK(reasons.at("good") == "duplicate id");
    CHECK(reasons.at("early").find("year") != std::string::npos);
    CHECK(reasons.at("late").find("year") != std::string::npos);
    CHECK(reasons.at("nonnum").find("year") != std::string::npos);
    CHECK(reasons.at("weird").find("source") != std::string::npos);
    CHECK(reasons.at("missing").find("unreadable") != std::string::npos);
    CHECK(reasons.at("blank") == "empty after cleaning");
    CHECK(reasons.at("short").find("fields") != std::string::npos);
}

TEST_CASE("load_corpus rejects a manifest with the wrong header") {
    testsupport::ScratchDir dir("bad_header");
    write_text(dir.path() / "manifest.csv", "doc,file,when,where\n");
    CHECK_THROWS_AS(corpus::load_corpus(dir.path() / "manifest.csv"), DataError);
    CHECK_THROWS_AS(corpus::load_corpus(dir.path() / "absent.csv"), DataError);
}

TEST_CASE("ingestion report serializes counts, skips, and the config hash") {
    corpus::IngestionReport report;
    report.loaded = 3;
    report.replacement_char_count = 2;
    report.skipped.push_back({"x", "duplicate id"});
    const auto j = nlohmann::json::parse(corpus::ingestion_report_json(report, "deadbeef"));
    CHECK(j.at("loaded") == 3);
    CHECK(j.at("replacement_char_count") == 2);
    CHECK(j.at("skipped").size() == 1);
    CHECK(j.at("config_hash") == "deadbeef");
}

TEST_CASE("stratified assignment hits the 65/25/10 targets per class") {
    // Ten documents in each of four decades.
    std::vector<int> labels;
    for (int d = 0; d < 4; ++d) {
        for (int i = 0; i < 10; ++i) labels.push_back(d);
    }
    const auto parts = corpus::stratified_assignment(labels, {}, 42);
    REQUIRE(parts.size() == labels.size());

    std::map<int, std::array<int, 3>> per_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        per_class[labels[i]][static_cast<std::size_t>(parts[i])]++;
    }
    for (const auto& [label, counts] : per_class) {
        CHECK(std::abs(counts[0] - 6.5) <= 1.0);
        CHECK(std::abs(counts[1] - 2.5) <= 1.0);
        CHECK(std::abs(counts[2] - 1.0) <= 1.0);
        CHECK(counts[0] + counts[1] + counts[2] == 10);
    }
}

TEST_CASE("assignment is a deterministic function of the seed") {
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
    const auto a = corpus::stratified_assignment(labels, {}, 7);
    const auto b = corpus::stratified_assignment(labels, {}, 7);
    const auto c = corpus::stratified_assignment(labels, {}, 8);
    CHECK(a == b);
    CHECK(a != c);

    // A different seed moves members around but keeps the part sizes.
    std::array<int, 3> sizes_a{}, sizes_c{};
    for (int p : a) sizes_a[static_cast<std::size_t>(p)]++;
    for (int p : c) sizes_c[static_cast<std::size_t>(p)]++;
    CHECK(sizes_a == sizes_c);
}

TEST_CASE("classes with fewer than three documents all land in train") {
    std::vector<int> labels = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
    std::vector<std::string> warnings;
    const auto parts = corpus::stratified_assignment(labels, {}, 1, &warnings);
    for (std::size_t i = 10; i < labels.size(); ++i) CHECK(parts[i] == 0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("train") != std::string::npos);
}

TEST_CASE("split ratios must sum to one") {
    std::vector<int> labels(10, 0);
    corpus::SplitRatios bad{0.5, 0.4, 0.2};
    CHECK_THROWS_AS(corpus::stratified_assignment(labels, bad, 0), ConfigError);
}

TEST_CASE("stratified_split partitions documents at decade granularity") {
    std::vector<Document> docs;
    for (int i = 0; i < 30; ++i) {
        Document d;
        d.id = "d" + std::to_string(i);
        d.year = 1800 + (i % 3) * 10;
        d.text = "text";
        docs.push_back(d);
    }
    const auto split = corpus::stratified_split(docs, {}, 5);
    CHECK(split.train.size() + split.validation.size() + split.test.size() ==
          docs.size());
    std::set<std::string> seen;
    for (const auto* part : {&split.train, &split.validation, &split.test}) {
        for (const auto& d : *part) CHECK(seen.insert(d.id).second);
    }

    Document bad;
    bad.id = "bad";
    bad.year = 1500;
    CHECK_THROWS_AS(corpus::stratified_split({bad}, {}, 0), DataError);
}
