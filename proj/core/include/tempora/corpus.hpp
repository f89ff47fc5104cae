#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tempora {

constexpr int kMinYear = 1600;
constexpr int kMaxYear = 2029;

enum class Source { open_library, gutenberg, synthetic, other };

const char* to_string(Source s);
std::optional<Source> source_from_string(std::string_view s);

/// One text with its temporal label and provenance.
struct Document {
    std::string id;
    std::string text;  // UTF-8, post-normalization
    int year = 0;      // publication year, 1600..2029 after ingestion
    Source source = Source::other;
};

enum class TaskKind { century, decade, binary };

const char* to_string(TaskKind k);
std::optional<TaskKind> task_from_string(std::string_view s);

/// Maps years onto class indices for the three task formulations.
///
/// century: 5 classes, 1600-1699 -> 0 ... 2000-2029 -> 4
/// decade:  43 classes, (year - 1600) / 10
/// binary:  old = 0 iff year < threshold_year, else new = 1
struct LabelScale {
    TaskKind kind = TaskKind::century;
    int threshold_year = 0;  // binary only; multiple of 10

    static LabelScale century() { return {TaskKind::century, 0}; }
    static LabelScale decade() { return {TaskKind::decade, 0}; }
    static LabelScale binary(int threshold_year);

    int n_classes() const;
    int label_of(int year) const;
    std::string class_name(int cls) const;
    std::string describe() const;  // e.g. "decade", "binary@1900"
};

namespace corpus {

struct SkippedRow {
    std::string id;
    std::string reason;
};

struct IngestionReport {
    std::size_t loaded = 0;
    std::vector<SkippedRow> skipped;
    std::size_t replacement_char_count = 0;
};

/// Row of a manifest CSV (`id,path,year,source`), path relative to the
/// manifest's directory.
struct ManifestRow {
    std::string id;
    std::filesystem::path path;  // resolved to an absolute path at read time
    int year = 0;
    Source source = Source::other;
};

/// Removes a Gutenberg-style header (everything through the end of the
/// last line containing "*** START OF", case-insensitive) and footer
/// (everything from the first remaining line containing "*** END OF").
/// Returns the input unchanged when no marker is present. Idempotent.
std::string strip_boilerplate(std::string_view raw);

/// Line endings to LF, space/tab runs to one space, 3+ newline runs to
/// two, then trim. Casing and punctuation are preserved. Idempotent.
std::string normalize(std::string_view raw);

/// Loads documents named by a manifest CSV. Each file is decoded with
/// replacement of invalid bytes, then passed through strip_boilerplate
/// and normalize. Rows with bad years, unreadable files, duplicate ids,
/// or empty cleaned text are skipped and recorded in the report.
/// A missing or malformed manifest throws DataError.
std::vector<Document> load_corpus(const std::filesystem::path& manifest_path,
                                  IngestionReport* report = nullptr,
                                  std::vector<ManifestRow>* rows_out = nullptr);

struct SplitRatios {
    double train = 0.65;
    double validation = 0.25;
    double test = 0.10;
};

struct SplitCorpus {
    std::vector<Document> train;
    std::vector<Document> validation;
    std::vector<Document> test;
    std::uint64_t seed = 0;
};

/// Per-label three-way assignment (0 = train, 1 = validation, 2 = test)
/// with a seeded shuffle inside each label group and largest-remainder
/// rounding of the ratio targets. Groups with fewer than 3 items go
/// entirely to train with a warning.
std::vector<int> stratified_assignment(const std::vector<int>& labels,
                                       SplitRatios ratios, std::uint64_t seed,
                                       std::vector<std::string>* warnings = nullptr);

/// Stratified split at decade granularity.
SplitCorpus stratified_split(const std::vector<Document>& docs, SplitRatios ratios,
                             std::uint64_t seed,
                             std::vector<std::string>* warnings = nullptr);

std::string ingestion_report_json(const IngestionReport& report,
                                  std::string_view config_hash = {});

}  // namespace corpus
}  // namespace tempora
