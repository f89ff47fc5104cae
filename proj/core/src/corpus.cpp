#include "tempora/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "tempora/errors.hpp"
#include "tempora/rng.hpp"
#include "tempora/text.hpp"

namespace tempora {

const char* to_string(Source s) {
    switch (s) {
        case Source::open_library: return "open_library";
        case Source::gutenberg: return "gutenberg";
        case Source::synthetic: return "synthetic";
        case Source::other: return "other";
    }
    return "other";
}

std::optional<Source> source_from_string(std::string_view s) {
    if (s == "open_library") return Source::open_library;
    if (s == "gutenberg") return Source::gutenberg;
    if (s == "synthetic") return Source::synthetic;
    if (s == "other") return Source::other;
    return std::nullopt;
}

const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::century: return "century";
        case TaskKind::decade: return "decade";
        case TaskKind::binary: return "binary";
    }
    return "century";
}

std::optional<TaskKind> task_from_string(std::string_view s) {
    if (s == "century") return TaskKind::century;
    if (s == "decade") return TaskKind::decade;
    if (s == "binary") return TaskKind::binary;
    return std::nullopt;
}

LabelScale LabelScale::binary(int threshold_year) {
    if (threshold_year % 10 != 0) {
        throw ConfigError("binary threshold year must be a multiple of 10, got " +
                          std::to_string(threshold_year));
    }
    return {TaskKind::binary, threshold_year};
}

int LabelScale::n_classes() const {
    switch (kind) {
        case TaskKind::century: return 5;
        case TaskKind::decade: return 43;
        case TaskKind::binary: return 2;
    }
    return 0;
}

int LabelScale::label_of(int year) const {
    switch (kind) {
        case TaskKind::century: return (year - kMinYear) / 100;
        case TaskKind::decade: return (year - kMinYear) / 10;
        case TaskKind::binary: return year < threshold_year ? 0 : 1;
    }
    return 0;
}

std::string LabelScale::class_name(int cls) const {
    switch (kind) {
        case TaskKind::century: {
            static const char* names[] = {"17th century", "18th century", "19th century",
                                          "20th century", "21st century"};
            return names[cls];
        }
        case TaskKind::decade:
            return std::to_string(kMinYear + 10 * cls) + "s";
        case TaskKind::binary:
            return cls == 0 ? "old" : "new";
    }
    return {};
}

std::string LabelScale::describe() const {
    if (kind == TaskKind::binary) {
        return "binary@" + std::to_string(threshold_year);
    }
    return to_string(kind);
}

namespace corpus {

namespace {

bool contains_marker_ci(std::string_view line, std::string_view marker) {
    if (line.size() < marker.size()) return false;
    for (std::size_t i = 0; i + marker.size() <= line.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < marker.size(); ++j) {
            char a = line[i + j];
            char b = marker[j];
            if (std::toupper(static_cast<unsigned char>(a)) != b) {
                hit = false;
                break;
            }
        }
        if (hit) return true;
    }
    return false;
}

}  // namespace

std::string strip_boilerplate(std::string_view raw) {
    // Walk lines, remembering the last START marker and the first END
    // marker that follows it.
    std::size_t body_begin = 0;
    std::size_t body_end = raw.size();
    std::size_t pos = 0;
    bool saw_start = false;
    while (pos <= raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        std::size_t line_end = (eol == std::string_view::npos) ? raw.size() : eol;
        std::string_view line = raw.substr(pos, line_end - pos);
        if (contains_marker_ci(line, "*** START OF")) {
            body_begin = (eol == std::string_view::npos) ? raw.size() : eol + 1;
            saw_start = true;
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    (void)saw_start;
    pos = body_begin;
    while (pos <= raw.size() && pos < raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        std::size_t line_end = (eol == std::string_view::npos) ? raw.size() : eol;
        std::string_view line = raw.substr(pos, line_end - pos);
        if (contains_marker_ci(line, "*** END OF")) {
            body_end = pos;
            break;
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (body_begin == 0 && body_end == raw.size()) {
        return std::string(raw);
    }
    if (body_begin >= body_end) return {};
    return std::string(raw.substr(body_begin, body_end - body_begin));
}

std::string normalize(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    // CRLF / CR -> LF
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r') {
            if (i + 1 < raw.size() && raw[i + 1] == '\n') continue;
            s.push_back('\n');
        } else {
            s.push_back(raw[i]);
        }
    }
    // space/tab runs -> one space
    std::string t;
    t.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == ' ' || s[i] == '\t') {
            t.push_back(' ');
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        } else {
            t.push_back(s[i]);
            ++i;
        }
    }
    // 3+ newline runs -> two
    std::string u;
    u.reserve(t.size());
    for (std::size_t i = 0; i < t.size();) {
        if (t[i] == '\n') {
            std::size_t j = i;
            while (j < t.size() && t[j] == '\n') ++j;
            u.append(j - i >= 3 ? 2 : j - i, '\n');
            i = j;
        } else {
            u.push_back(t[i]);
            ++i;
        }
    }
    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
    };
    std::size_t b = 0, e = u.size();
    while (b < e && is_ws(u[b])) ++b;
    while (e > b && is_ws(u[e - 1])) --e;
    return u.substr(b, e - b);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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
    return fields;
}

std::optional<int> parse_year(const std::string& s) {
    if (s.empty()) return std::nullopt;
    int value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + (c - '0');
        if (value > 1000000) return std::nullopt;
    }
    return value;
}

}  // namespace

std::vector<Document> load_corpus(const std::filesystem::path& manifest_path,
                                  IngestionReport* report,
                                  std::vector<ManifestRow>* rows_out) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open manifest: " + manifest_path.string());
    }
    IngestionReport local;
    IngestionReport& rep = report ? *report : local;
    rep = IngestionReport{};

    std::string header;
    if (!std::getline(in, header)) {
        throw DataError("empty manifest: " + manifest_path.string());
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "id,path,year,source") {
        throw DataError("manifest header must be `id,path,year,source`, got `" + header +
                        "` in " + manifest_path.string());
    }

    const std::filesystem::path base = manifest_path.has_parent_path()
                                           ? manifest_path.parent_path()
                                           : std::filesystem::path(".");
    std::vector<Document> docs;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        const std::string row_id = fields.empty() ? ("line " + std::to_string(line_no))
                                                  : fields[0];
        if (fields.size() != 4) {
            rep.skipped.push_back({row_id, "expected 4 fields, got " +
                                               std::to_string(fields.size())});
            continue;
        }
        if (!seen_ids.insert(fields[0]).second) {
            rep.skipped.push_back({fields[0], "duplicate id"});
            continue;
        }
        auto year = parse_year(fields[2]);
        if (!year || *year < kMinYear || *year > kMaxYear) {
            rep.skipped.push_back({fields[0], "invalid or out-of-range year `" + fields[2] + "`"});
            continue;
        }
        auto source = source_from_string(fields[3]);
        if (!source) {
            rep.skipped.push_back({fields[0], "unknown source `" + fields[3] + "`"});
            continue;
        }
        std::filesystem::path file = fields[1];
        if (file.is_relative()) file = base / file;
        std::ifstream doc_in(file, std::ios::binary);
        if (!doc_in) {
            rep.skipped.push_back({fields[0], "unreadable file: " + file.string()});
            continue;
        }
        std::ostringstream buf;
        buf << doc_in.rdbuf();
        auto decoded = text::decode_utf8(buf.str());
        rep.replacement_char_count += decoded.replacements;
        std::string cleaned =
            normalize(strip_boilerplate(text::encode_utf8(decoded.text)));
        if (cleaned.empty()) {
            rep.skipped.push_back({fields[0], "empty after cleaning"});
            continue;
        }
        Document doc;
        doc.id = fields[0];
        doc.text = std::move(cleaned);
        doc.year = *year;
        doc.source = *source;
        docs.push_back(std::move(doc));
        if (rows_out) {
            rows_out->push_back({fields[0], std::filesystem::absolute(file), *year, *source});
        }
    }
    rep.loaded = docs.size();
    return docs;
}

std::vector<int> stratified_assignment(const std::vector<int>& labels, SplitRatios ratios,
                                       std::uint64_t seed,
                                       std::vector<std::string>* warnings) {
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split ratios must sum to 1.0, got " + std::to_string(sum));
    }
    // label -> member indices, grouped in first-seen order of sorted labels
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[labels[i]].push_back(i);
    }
    std::vector<int> assignment(labels.size(), 0);
    for (auto& [label, members] : groups) {
        if (members.size() < 3) {
            if (warnings) {
                warnings->push_back("class " + std::to_string(label) + " has only " +
                                    std::to_string(members.size()) +
                                    " documents; assigning all to train");
            }
            continue;  // assignment already 0 (train)
        }
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(label));
        rng.shuffle(members);
        const double n = static_cast<double>(members.size());
        const double want[3] = {n * ratios.train, n * ratios.validation, n * ratios.test};
        std::size_t take[3];
        double frac[3];
        std::size_t assigned = 0;
        for (int p = 0; p < 3; ++p) {
            take[p] = static_cast<std::size_t>(std::floor(want[p] + 1e-12));
            frac[p] = want[p] - static_cast<double>(take[p]);
            assigned += take[p];
        }
        // largest remainder; ties resolved train > validation > test
        while (assigned < members.size()) {
            int best = 0;
            for (int p = 1; p < 3; ++p) {
                if (frac[p] > frac[best] + 1e-12) best = p;
            }
            take[best] += 1;
            frac[best] = -1.0;
            ++assigned;
        }
        std::size_t at = 0;
        for (int p = 0; p < 3; ++p) {
            for (std::size_t k = 0; k < take[p]; ++k, ++at) {
                assignment[members[at]] = p;
            }
        }
    }
    return assignment;
}

SplitCorpus stratified_split(const std::vector<Document>& docs, SplitRatios ratios,
                             std::uint64_t seed, std::vector<std::string>* warnings) {
    std::vector<int> labels(docs.size());
    const LabelScale scale = LabelScale::decade();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].year < kMinYear || docs[i].year > kMaxYear) {
            throw DataError("document " + docs[i].id + " has out-of-range year " +
                            std::to_string(docs[i].year));
        }
        labels[i] = scale.label_of(docs[i].year);
    }
    auto assignment = stratified_assignment(labels, ratios, seed, warnings);
    SplitCorpus out;
    out.seed = seed;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        switch (assignment[i]) {
            case 0: out.train.push_back(docs[i]); break;
            case 1: out.validation.push_back(docs[i]); break;
            default: out.test.push_back(docs[i]); break;
        }
    }
    return out;
}

std::string ingestion_report_json(const IngestionReport& report,
                                  std::string_view config_hash) {
    nlohmann::json j;
    j["loaded"] = report.loaded;
    j["skipped"] = nlohmann::json::array();
    for (const auto& s : report.skipped) {
        j["skipped"].push_back({{"id", s.id}, {"reason", s.reason}});
    }
    j["replacement_char_count"] = report.replacement_char_count;
    if (!config_hash.empty()) j["config_hash"] = std::string(config_hash);
    return j.dump(2) + "\n";
}

}  // namespace corpus
}  // namespace tempora
