#include "tempora/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tempora/errors.hpp"
#include "tempora/eval.hpp"
#include "tempora/features.hpp"
#include "tempora/markov.hpp"
#include "tempora/text.hpp"

namespace tempora::pipeline {

namespace fs = std::filesystem;

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace {

const std::vector<std::string> kSplitNames = {"train", "validation", "test"};

std::string read_file(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(std::string("cannot open ") + what + ": " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("failed writing " + path.string());
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.is_absolute()) return p;
    return base / p;
}

std::uint64_t get_seed(const nlohmann::json& j, const char* key,
                       std::vector<std::string>& problems, const std::string& where) {
    if (!j.contains(key)) return 0;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
        problems.push_back(where + "." + key + " must be an integer seed");
        return 0;
    }
    const auto v = j.at(key).get<std::int64_t>();
    if (v < 0) {
        problems.push_back(where + "." + key + " must be nonnegative");
        return 0;
    }
    return static_cast<std::uint64_t>(v);
}

TaskTrainConfig parse_train_section(const nlohmann::json& j, const std::string& where,
                                    std::vector<std::string>& problems) {
    TaskTrainConfig c;
    const auto get_int = [&](const char* key, int fallback, int lo) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number_integer()) {
            problems.push_back(where + "." + key + " must be an integer");
            return fallback;
        }
        const int v = j.at(key).get<int>();
        if (v < lo) {
            problems.push_back(where + "." + key + " must be >= " + std::to_string(lo));
            return fallback;
        }
        return v;
    };
    const auto get_real = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number()) {
            problems.push_back(where + "." + key + " must be a number");
            return fallback;
        }
        return j.at(key).get<double>();
    };
    c.n_rounds = get_int("n_rounds", c.n_rounds, 1);
    c.max_depth = get_int("max_depth", c.max_depth, 1);
    c.min_samples_leaf = get_int("min_samples_leaf", c.min_samples_leaf, 1);
    c.histogram_bins = get_int("histogram_bins", c.histogram_bins, 2);
    c.learning_rate = get_real("learning_rate", c.learning_rate);
    if (!(c.learning_rate > 0.0) || c.learning_rate > 1.0) {
        problems.push_back(where + ".learning_rate must be in (0, 1]");
        c.learning_rate = 0.1;
    }
    c.feature_subsample = get_real("feature_subsample", c.feature_subsample);
    if (!(c.feature_subsample > 0.0) || c.feature_subsample > 1.0) {
        problems.push_back(where + ".feature_subsample must be in (0, 1]");
        c.feature_subsample = 1.0;
    }
    c.seed = get_seed(j, "seed", problems, where);
    return c;
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    PipelineConfig config;
    config.config_path = fs::absolute(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    config.config_hash = fnv1a_hex(bytes);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    std::vector<std::string> problems;
    const fs::path base = config.config_path.parent_path();

    if (!j.contains("manifest") || !j.at("manifest").is_string()) {
        problems.push_back("`manifest` (string path) is required");
    } else {
        config.manifest = resolve(base, j.at("manifest").get<std::string>());
        if (!fs::exists(config.manifest)) {
            problems.push_back("manifest does not exist: " + config.manifest.string());
        }
    }
    if (!j.contains("work_dir") || !j.at("work_dir").is_string()) {
        problems.push_back("`work_dir` (string path) is required");
    } else {
        config.work_dir = resolve(base, j.at("work_dir").get<std::string>());
    }

    if (j.contains("split")) {
        const auto& sj = j.at("split");
        if (sj.contains("ratios")) {
            const auto& r = sj.at("ratios");
            if (!r.is_array() || r.size() != 3 || !r[0].is_number() ||
                !r[1].is_number() || !r[2].is_number()) {
                problems.push_back("split.ratios must be three numbers");
            } else {
                config.ratios.train = r[0].get<double>();
                config.ratios.validation = r[1].get<double>();
                config.ratios.test = r[2].get<double>();
                const double sum = config.ratios.train + config.ratios.validation +
                                   config.ratios.test;
                if (std::abs(sum - 1.0) > 1e-9 || config.ratios.train <= 0.0 ||
                    config.ratios.validation < 0.0 || config.ratios.test < 0.0) {
                    problems.push_back("split.ratios must be nonnegative and sum to 1 "
                                       "with a positive train share");
                }
            }
        }
        config.split_seed = get_seed(sj, "seed", problems, "split");
    }

    if (j.contains("markov")) {
        const auto& mj = j.at("markov");
        if (mj.contains("orders")) {
            std::vector<int> orders;
            if (mj.at("orders").is_array()) {
                for (const auto& o : mj.at("orders")) {
                    if (o.is_number_integer()) orders.push_back(o.get<int>());
                }
            }
            if (orders != std::vector<int>{1, 2}) {
                problems.push_back("markov.orders must be [1, 2]; the feature schema "
                                   "names both orders");
            } else {
                config.markov.orders = orders;
            }
        }
        if (mj.contains("alpha") && !mj.at("alpha").is_null()) {
            if (!mj.at("alpha").is_number() || !(mj.at("alpha").get<double>() > 0.0)) {
                problems.push_back("markov.alpha must be positive or null");
            } else {
                config.markov.alpha = mj.at("alpha").get<double>();
            }
        }
        if (mj.contains("reference_budget_chars")) {
            if (!mj.at("reference_budget_chars").is_number_integer() ||
                mj.at("reference_budget_chars").get<std::int64_t>() < 1000) {
                problems.push_back("markov.reference_budget_chars must be >= 1000");
            } else {
                config.markov.reference_budget_chars =
                    mj.at("reference_budget_chars").get<std::size_t>();
            }
        }
    }

    if (j.contains("lexicon") && !j.at("lexicon").is_null()) {
        if (!j.at("lexicon").is_string()) {
            problems.push_back("`lexicon` must be a string path");
        } else {
            config.lexicon_path = resolve(base, j.at("lexicon").get<std::string>());
            if (!fs::exists(*config.lexicon_path)) {
                problems.push_back("lexicon does not exist: " +
                                   config.lexicon_path->string());
            }
        }
    }

    if (j.contains("train")) {
        const auto& tj = j.at("train");
        if (tj.contains("century")) {
            config.train_century = parse_train_section(tj.at("century"), "train.century",
                                                       problems);
        }
        if (tj.contains("decade")) {
            config.train_decade = parse_train_section(tj.at("decade"), "train.decade",
                                                      problems);
        }
        if (tj.contains("binary")) {
            config.train_binary = parse_train_section(tj.at("binary"), "train.binary",
                                                      problems);
            if (tj.at("binary").contains("threshold_year")) {
                const auto& t = tj.at("binary").at("threshold_year");
                if (!t.is_number_integer() || t.get<int>() % 10 != 0 ||
                    t.get<int>() < 1610 || t.get<int>() > 2010) {
                    problems.push_back("train.binary.threshold_year must be a decade "
                                       "year within 1610..2010");
                } else {
                    config.binary_threshold_year = t.get<int>();
                }
            }
        }
    }

    if (j.contains("sweep")) {
        const auto& sj = j.at("sweep");
        if (sj.contains("thresholds")) {
            if (!sj.at("thresholds").is_array()) {
                problems.push_back("sweep.thresholds must be an array of decade years");
            } else {
                for (const auto& t : sj.at("thresholds")) {
                    if (!t.is_number_integer() || t.get<int>() % 10 != 0 ||
                        t.get<int>() < 1610 || t.get<int>() > 2010) {
                        problems.push_back("sweep threshold must be a decade year "
                                           "within 1610..2010");
                        break;
                    }
                    config.sweep_thresholds.push_back(t.get<int>());
                }
            }
        }
        config.sweep_seed = get_seed(sj, "seed", problems, "sweep");
    }

    config.eval_topk = {{"century", {1, 2}}, {"decade", {1, 3, 5, 10}},
                        {"binary", {1, 2}}};
    if (j.contains("eval") && j.at("eval").contains("auprc")) {
        const auto& a = j.at("eval").at("auprc");
        if (a.is_string() && a.get<std::string>() == "weighted") {
            config.eval_auprc_weighted = true;
        } else if (!a.is_string() || a.get<std::string>() != "macro") {
            problems.push_back("eval.auprc must be \"macro\" or \"weighted\"");
        }
    }
    if (j.contains("eval") && j.at("eval").contains("topk")) {
        for (const auto& [kind, arr] : j.at("eval").at("topk").items()) {
            if (!task_from_string(kind)) {
                problems.push_back("eval.topk has unknown task `" + kind + "`");
                continue;
            }
            std::vector<int> ks;
            bool ok = arr.is_array();
            if (ok) {
                for (const auto& k : arr) {
                    if (!k.is_number_integer() || k.get<int>() < 1) {
                        ok = false;
                        break;
                    }
                    ks.push_back(k.get<int>());
                }
            }
            if (!ok) {
                problems.push_back("eval.topk." + kind + " must be positive integers");
            } else {
                config.eval_topk[kind] = ks;
            }
        }
    }

    if (j.contains("importance")) {
        const auto& ij = j.at("importance");
        if (ij.contains("metric")) {
            const std::string m = ij.at("metric").is_string()
                                      ? ij.at("metric").get<std::string>()
                                      : std::string();
            if (m == "accuracy") {
                config.importance_metric = model::ImportanceMetric::accuracy;
            } else if (m == "f1_macro") {
                config.importance_metric = model::ImportanceMetric::f1_macro;
            } else {
                problems.push_back("importance.metric must be accuracy or f1_macro");
            }
        }
        if (ij.contains("repeats")) {
            if (!ij.at("repeats").is_number_integer() || ij.at("repeats").get<int>() < 1) {
                problems.push_back("importance.repeats must be >= 1");
            } else {
                config.importance_repeats = ij.at("repeats").get<int>();
            }
        }
        config.importance_seed = get_seed(ij, "seed", problems, "importance");
    }

    if (!problems.empty()) {
        std::string msg = "invalid config " + path.string() + ":";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return config;
}

LabelScale task_scale(const PipelineConfig& config, TaskKind kind) {
    switch (kind) {
        case TaskKind::century: return LabelScale::century();
        case TaskKind::decade: return LabelScale::decade();
        case TaskKind::binary: return LabelScale::binary(config.binary_threshold_year);
    }
    return LabelScale::century();
}

model::TrainConfig train_config(const PipelineConfig& config, TaskKind kind) {
    const TaskTrainConfig* src = &config.train_century;
    if (kind == TaskKind::decade) src = &config.train_decade;
    if (kind == TaskKind::binary) src = &config.train_binary;
    model::TrainConfig tc;
    tc.task = task_scale(config, kind);
    tc.n_rounds = src->n_rounds;
    tc.max_depth = src->max_depth;
    tc.learning_rate = src->learning_rate;
    tc.min_samples_leaf = src->min_samples_leaf;
    tc.feature_subsample = src->feature_subsample;
    tc.histogram_bins = src->histogram_bins;
    tc.seed = src->seed;
    return tc;
}

namespace {

fs::path split_manifest_path(const PipelineConfig& config, const std::string& split) {
    return config.work_dir / "split" / (split + ".csv");
}

fs::path features_path(const PipelineConfig& config, const std::string& split) {
    return config.work_dir / "features" / (split + ".csv");
}

fs::path model_path_for(const PipelineConfig& config, TaskKind task) {
    return config.work_dir / "models" / (std::string(to_string(task)) + ".json");
}

fs::path ref_path(const PipelineConfig& config, int order) {
    return config.work_dir / "refs" / ("order" + std::to_string(order) + ".json");
}

void check_split_name(const std::string& split) {
    if (std::find(kSplitNames.begin(), kSplitNames.end(), split) == kSplitNames.end()) {
        throw ConfigError("unknown split `" + split +
                          "`; expected train, validation, or test");
    }
}

std::string manifest_csv(const std::vector<corpus::ManifestRow>& rows) {
    std::string out = "id,path,year,source\n";
    for (const auto& r : rows) {
        out += r.id;
        out += ',';
        out += r.path.string();
        out += ',';
        out += std::to_string(r.year);
        out += ',';
        out += to_string(r.source);
        out += '\n';
    }
    return out;
}

struct References {
    markov::ContextModel order1;
    markov::ContextModel order2;
};

References load_references(const PipelineConfig& config) {
    const fs::path p1 = ref_path(config, 1);
    const fs::path p2 = ref_path(config, 2);
    if (!fs::exists(p1) || !fs::exists(p2)) {
        throw DataError("reference models not found under " +
                        (config.work_dir / "refs").string() +
                        "; fit references first by running `extract --split train`");
    }
    return {markov::load_model(p1), markov::load_model(p2)};
}

features::NeologismLexicon load_configured_lexicon(const PipelineConfig& config) {
    if (config.lexicon_path) return features::load_lexicon(*config.lexicon_path);
    return features::default_lexicon();
}

void write_extraction_report(const PipelineConfig& config, const std::string& split,
                             const features::ExtractionReport& report) {
    nlohmann::json j;
    j["version"] = "tempora.extract/1";
    j["split"] = split;
    j["documents"] = report.documents;
    j["degenerate_compression"] = report.degenerate_compression;
    j["empty_documents"] = report.empty_documents;
    j["config_hash"] = config.config_hash;
    write_file(config.work_dir / "features" / ("extract_report_" + split + ".json"),
               j.dump(2) + "\n");
}

}  // namespace

void cmd_split(const PipelineConfig& config, bool verbose) {
    corpus::IngestionReport report;
    std::vector<corpus::ManifestRow> manifest_rows;
    const auto docs = corpus::load_corpus(config.manifest, &report, &manifest_rows);
    if (docs.empty()) {
        throw DataError("manifest yields no usable documents: " +
                        config.manifest.string());
    }

    std::vector<int> labels(docs.size());
    const LabelScale scale = LabelScale::decade();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        labels[i] = scale.label_of(docs[i].year);
    }
    std::vector<std::string> warnings;
    const auto assignment =
        corpus::stratified_assignment(labels, config.ratios, config.split_seed,
                                      &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    std::vector<std::vector<corpus::ManifestRow>> parts(3);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        parts[static_cast<std::size_t>(assignment[i])].push_back(manifest_rows[i]);
    }
    for (std::size_t p = 0; p < 3; ++p) {
        write_file(split_manifest_path(config, kSplitNames[p]),
                   manifest_csv(parts[p]));
    }
    write_file(config.work_dir / "split" / "ingestion_report.json",
               corpus::ingestion_report_json(report, config.config_hash));
    if (verbose) {
        std::cerr << "split sizes: train=" << parts[0].size()
                  << " validation=" << parts[1].size() << " test=" << parts[2].size()
                  << " (skipped " << report.skipped.size() << " manifest rows)\n";
    }
}

void cmd_extract(const PipelineConfig& config, const std::string& split, int workers,
                 bool verbose) {
    check_split_name(split);
    const fs::path manifest = split_manifest_path(config, split);
    if (!fs::exists(manifest)) {
        throw DataError("split manifest not found: " + manifest.string() +
                        "; run `split` first");
    }
    const auto docs = corpus::load_corpus(manifest, nullptr, nullptr);

    std::optional<References> refs;
    if (split == "train") {
        // References come from a deterministic sample of the training
        // split: documents in id order, whole texts, until the
        // character budget is reached.
        std::vector<const Document*> by_id;
        by_id.reserve(docs.size());
        for (const auto& d : docs) by_id.push_back(&d);
        std::sort(by_id.begin(), by_id.end(),
                  [](const Document* a, const Document* b) { return a->id < b->id; });
        std::vector<std::u32string> sample;
        std::vector<std::string> ids_used;
        std::size_t total_chars = 0;
        for (const Document* d : by_id) {
            if (total_chars >= config.markov.reference_budget_chars) break;
            auto decoded = text::decode_utf8(d->text);
            total_chars += decoded.text.size();
            sample.push_back(std::move(decoded.text));
            ids_used.push_back(d->id);
        }
        if (sample.empty()) {
            throw DataError("train split has no documents to fit references on");
        }
        const auto alphabet =
            markov::Alphabet::build(sample, markov::OovPolicy::escape_symbol);
        const double alpha = config.markov.alpha
                                 ? *config.markov.alpha
                                 : 1.0 / static_cast<double>(alphabet.size());
        std::size_t skipped1 = 0, skipped2 = 0;
        auto ref1 = markov::fit_reference(sample, 1, alpha, alphabet, &skipped1);
        auto ref2 = markov::fit_reference(sample, 2, alpha, alphabet, &skipped2);
        fs::create_directories(config.work_dir / "refs");
        markov::save_model(ref1, ref_path(config, 1));
        markov::save_model(ref2, ref_path(config, 2));
        nlohmann::json meta;
        meta["version"] = "tempora.refs/1";
        meta["ids_used"] = ids_used;
        meta["total_chars"] = total_chars;
        meta["alpha"] = alpha;
        meta["alphabet_size"] = alphabet.size();
        meta["policy"] = markov::to_string(alphabet.policy());
        meta["short_texts_skipped"] = skipped1 + skipped2;
        meta["config_hash"] = config.config_hash;
        write_file(config.work_dir / "refs" / "refs_meta.json", meta.dump(2) + "\n");
        if (verbose) {
            std::cerr << "fit references on " << ids_used.size() << " documents ("
                      << total_chars << " chars, alphabet " << alphabet.size()
                      << ")\n";
        }
        refs = References{std::move(ref1), std::move(ref2)};
    } else {
        refs = load_references(config);
    }

    const auto lexicon = load_configured_lexicon(config);
    features::ExtractionContext ctx;
    ctx.ref_order1 = &refs->order1;
    ctx.ref_order2 = &refs->order2;
    ctx.lexicon = &lexicon;
    features::ExtractionReport report;
    const auto rows = features::extract_all(docs, ctx, workers, &report);
    fs::create_directories(config.work_dir / "features");
    features::write_features_csv(features_path(config, split), rows);
    write_extraction_report(config, split, report);
    if (verbose) {
        std::cerr << "extracted " << rows.size() << " documents ("
                  << report.degenerate_compression << " too short for compression)\n";
    }
}

void cmd_train(const PipelineConfig& config, TaskKind task, bool verbose) {
    const fs::path features_csv = features_path(config, "train");
    if (!fs::exists(features_csv)) {
        throw DataError("training features not found: " + features_csv.string() +
                        "; run `extract --split train` first");
    }
    const auto rows = features::read_features_csv(features_csv);
    const auto tc = train_config(config, task);
    const auto result = model::train(rows, tc);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    fs::create_directories(config.work_dir / "models");
    model::save(result.model, model_path_for(config, task));

    nlohmann::json log;
    log["version"] = "tempora.train_log/1";
    log["task"] = tc.task.describe();
    log["n_rows"] = rows.size();
    log["n_rounds_trained"] = result.model.n_rounds_trained;
    log["round_train_loss"] = result.round_train_loss;
    log["warnings"] = result.warnings;
    log["config_hash"] = config.config_hash;
    write_file(config.work_dir / "models" /
                   ("train_log_" + std::string(to_string(task)) + ".json"),
               log.dump(2) + "\n");
    if (verbose) {
        std::cerr << "trained " << tc.task.describe() << " on " << rows.size()
                  << " rows, " << result.model.trees.size() << " trees\n";
    }
}

void cmd_eval(const PipelineConfig& config, TaskKind task, const std::string& split,
              bool verbose) {
    check_split_name(split);
    const fs::path mpath = model_path_for(config, task);
    if (!fs::exists(mpath)) {
        throw ModelError("model not found: " + mpath.string() + "; run `train` first");
    }
    const auto m = model::load(mpath);
    const fs::path fpath = features_path(config, split);
    if (!fs::exists(fpath)) {
        throw DataError("features not found: " + fpath.string() +
                        "; run `extract --split " + split + "` first");
    }
    const auto rows = features::read_features_csv(fpath);
    const auto& ks = config.eval_topk.at(to_string(task));
    const auto report = eval::evaluate(m, rows, ks, config.eval_auprc_weighted);

    const std::string stem =
        "metrics_" + std::string(to_string(task)) + "_" + split;
    write_file(config.work_dir / "reports" / (stem + ".json"),
               eval::metrics_json(report, split, config.config_hash));
    write_file(config.work_dir / "reports" / (stem + ".csv"),
               eval::metrics_csv(report, split));
    if (verbose) {
        std::cerr << stem << ": accuracy=" << report.accuracy
                  << " f1_macro=" << report.f1_macro << " on " << report.n_samples
                  << " rows\n";
    }
}

void cmd_sweep(const PipelineConfig& config, bool verbose) {
    if (config.sweep_thresholds.empty()) {
        throw ConfigError("sweep.thresholds is empty in the config");
    }
    std::vector<features::FeatureVector> rows;
    for (const auto& split : kSplitNames) {
        const fs::path fpath = features_path(config, split);
        if (!fs::exists(fpath)) {
            throw DataError("features not found: " + fpath.string() +
                            "; extract all three splits before sweeping");
        }
        auto part = features::read_features_csv(fpath);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
    }
    // Same hyperparameters as the multiclass century task; only the
    // task label and seed differ per threshold.
    model::TrainConfig tc = train_config(config, TaskKind::century);
    tc.seed = config.sweep_seed;
    const auto result = eval::threshold_sweep(rows, config.sweep_thresholds, tc);
    write_file(config.work_dir / "reports" / "sweep.csv", eval::sweep_csv(result));
    write_file(config.work_dir / "reports" / "sweep.json",
               eval::sweep_json(result, config.config_hash));
    if (verbose) {
        std::size_t used = 0;
        for (const auto& p : result.points) used += p.skipped ? 0 : 1;
        std::cerr << "sweep evaluated " << used << "/" << result.points.size()
                  << " thresholds\n";
    }
}

void cmd_importance(const PipelineConfig& config, TaskKind task, bool verbose) {
    const fs::path mpath = model_path_for(config, task);
    if (!fs::exists(mpath)) {
        throw ModelError("model not found: " + mpath.string() + "; run `train` first");
    }
    const auto m = model::load(mpath);
    const fs::path fpath = features_path(config, "validation");
    if (!fs::exists(fpath)) {
        throw DataError("features not found: " + fpath.string() +
                        "; run `extract --split validation` first");
    }
    const auto rows = features::read_features_csv(fpath);
    auto report = model::gain_importance(m);
    model::permutation_importance(m, rows, config.importance_metric,
                                  config.importance_repeats, config.importance_seed,
                                  &report);
    write_file(config.work_dir / "reports" /
                   ("importance_" + std::string(to_string(task)) + ".json"),
               model::importance_report_json(report, config.config_hash));
    if (verbose) {
        std::cerr << "importance over " << rows.size() << " rows, "
                  << config.importance_repeats << " repeats\n";
    }
}

void cmd_predict(const PipelineConfig& config, const fs::path& model_path,
                 const fs::path& input_path, bool verbose) {
    const auto m = model::load(model_path);
    const auto refs = load_references(config);
    const auto lexicon = load_configured_lexicon(config);

    const std::string raw = read_file(input_path, "input text");
    auto decoded = text::decode_utf8(raw);
    Document doc;
    doc.id = input_path.filename().string();
    doc.text = corpus::normalize(
        corpus::strip_boilerplate(text::encode_utf8(decoded.text)));
    doc.year = 0;
    doc.source = Source::other;

    features::ExtractionContext ctx;
    ctx.ref_order1 = &refs.order1;
    ctx.ref_order2 = &refs.order2;
    ctx.lexicon = &lexicon;
    bool degenerate = false;
    const auto fv = features::extract(doc, ctx, &degenerate);

    const auto proba = model::predict_proba(m, fv.values);
    const int predicted = model::predict(m, fv.values);
    const auto contributions = model::path_contributions(m, fv.values);

    std::vector<std::size_t> class_order(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) class_order[i] = i;
    std::stable_sort(class_order.begin(), class_order.end(),
                     [&](std::size_t a, std::size_t b) { return proba[a] > proba[b]; });

    nlohmann::json j;
    j["version"] = "tempora.prediction/1";
    j["input"] = input_path.filename().string();
    j["task"] = m.task.describe();
    j["predicted_class"] = predicted;
    j["class_name"] = m.task.class_name(predicted);
    j["probabilities"] = proba;
    nlohmann::json topk = nlohmann::json::array();
    const std::size_t k_show = std::min<std::size_t>(5, proba.size());
    for (std::size_t i = 0; i < k_show; ++i) {
        topk.push_back({{"class", class_order[i]},
                        {"class_name", m.task.class_name(static_cast<int>(class_order[i]))},
                        {"probability", proba[class_order[i]]}});
    }
    j["topk"] = std::move(topk);

    // Attributions for the output driving the predicted class.
    const std::size_t out_index =
        m.task.kind == TaskKind::binary ? 0 : static_cast<std::size_t>(predicted);
    const auto& contrib = contributions.contributions[out_index];
    std::vector<std::size_t> order(features::kFeatureCount);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(contrib[a]) > std::abs(contrib[b]);
    });
    nlohmann::json attributions = nlohmann::json::array();
    for (std::size_t i = 0; i < 10 && i < order.size(); ++i) {
        attributions.push_back({{"feature", features::feature_names()[order[i]]},
                                {"contribution", contrib[order[i]]}});
    }
    j["path_contributions"] = std::move(attributions);
    j["attribution_method"] = "decision-path value changes (additive)";

    nlohmann::json warnings = nlohmann::json::array();
    if (doc.text.empty()) {
        warnings.push_back("input is empty after cleaning; features are sentinels");
    } else if (degenerate) {
        warnings.push_back("input shorter than 3 characters; compression features "
                           "are sentinels");
    }
    if (decoded.replacements > 0) {
        warnings.push_back(std::to_string(decoded.replacements) +
                           " invalid UTF-8 bytes were replaced");
    }
    j["warnings"] = std::move(warnings);
    j["config_hash"] = config.config_hash;

    std::cout << j.dump(2) << "\n";
    if (verbose) {
        std::cerr << "predicted " << m.task.class_name(predicted) << "\n";
    }
}

}  // namespace tempora::pipeline
