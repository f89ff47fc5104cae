#include "tempora/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <zlib.h>

#include "json.hpp"
#include "tempora/errors.hpp"
#include "tempora/eval.hpp"
#include "tempora/rng.hpp"

namespace tempora::model {

namespace {

constexpr double kLambda = 1.0;
constexpr double kMinGain = 1e-12;
constexpr double kProbClamp = 1e-12;
constexpr char kModelVersion[] = "tempora.model/1";

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void validate(const TrainConfig& config) {
    std::vector<std::string> problems;
    if (config.n_rounds < 1) problems.push_back("n_rounds must be >= 1");
    if (config.max_depth < 1) problems.push_back("max_depth must be >= 1");
    if (!(config.learning_rate > 0.0) || config.learning_rate > 1.0) {
        problems.push_back("learning_rate must be in (0, 1]");
    }
    if (config.min_samples_leaf < 1) problems.push_back("min_samples_leaf must be >= 1");
    if (!(config.feature_subsample > 0.0) || config.feature_subsample > 1.0) {
        problems.push_back("feature_subsample must be in (0, 1]");
    }
    if (config.histogram_bins < 2) problems.push_back("histogram_bins must be >= 2");
    if (!problems.empty()) {
        std::string msg = "invalid training config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

int label_for(const LabelScale& task, const features::FeatureVector& row) {
    if (task.kind != TaskKind::binary &&
        (row.year < kMinYear || row.year > kMaxYear)) {
        throw DataError("row " + row.doc_id + " has year " + std::to_string(row.year) +
                        " outside the labeled range");
    }
    return task.label_of(row.year);
}

namespace {

// Candidate thresholds per feature plus per-sample bin indices.
// bin(x) = first cut >= x, so a split at cut b sends x <= cuts[b] left.
struct BinnedData {
    std::vector<std::vector<double>> cuts;
    std::vector<std::uint16_t> bins;  // n_rows * kFeatureCount, row-major
    std::size_t n_rows = 0;

    std::uint16_t bin_of(std::size_t row, std::size_t feature) const {
        return bins[row * features::kFeatureCount + feature];
    }
};

BinnedData build_bins(const std::vector<features::FeatureVector>& rows, int max_bins) {
    BinnedData data;
    data.n_rows = rows.size();
    data.cuts.resize(features::kFeatureCount);
    data.bins.resize(rows.size() * features::kFeatureCount);
    std::vector<double> column(rows.size());
    for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i].values[f];
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> uniq = sorted;
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

        std::vector<double>& cuts = data.cuts[f];
        if (uniq.size() >= 2) {
            if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
                cuts.assign(uniq.begin(), uniq.end() - 1);
            } else {
                const std::size_t n = sorted.size();
                for (int b = 1; b < max_bins; ++b) {
                    const std::size_t idx =
                        static_cast<std::size_t>(b) * n / static_cast<std::size_t>(max_bins);
                    cuts.push_back(sorted[idx]);
                }
                std::sort(cuts.begin(), cuts.end());
                cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
                while (!cuts.empty() && cuts.back() >= uniq.back()) cuts.pop_back();
            }
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto it = std::lower_bound(cuts.begin(), cuts.end(), column[i]);
            data.bins[i * features::kFeatureCount + f] =
                static_cast<std::uint16_t>(it - cuts.begin());
        }
    }
    return data;
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    std::size_t cut_index = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedData& data, const std::vector<double>& grad,
                const std::vector<double>& hess, const TrainConfig& config,
                const std::vector<std::size_t>& allowed_features)
        : data_(data), grad_(grad), hess_(hess), config_(config),
          allowed_(allowed_features) {}

    Tree build(int output) {
        Tree tree;
        tree.output = output;
        std::vector<std::uint32_t> samples(data_.n_rows);
        std::iota(samples.begin(), samples.end(), 0);
        tree.nodes.emplace_back();
        grow(tree, 0, std::move(samples), 1);
        return tree;
    }

private:
    double node_value(double g, double h) const {
        return config_.learning_rate * (-g / (h + kLambda));
    }

    static double score(double g, double h) { return g * g / (h + kLambda); }

    void grow(Tree& tree, int node_index, std::vector<std::uint32_t> samples,
              int depth) {
        double g_total = 0.0, h_total = 0.0;
        for (std::uint32_t i : samples) {
            g_total += grad_[i];
            h_total += hess_[i];
        }
        tree.nodes[node_index].value = node_value(g_total, h_total);
        if (depth > config_.max_depth ||
            samples.size() < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
            return;
        }

        SplitChoice best;
        for (std::size_t f : allowed_) {
            const std::vector<double>& cuts = data_.cuts[f];
            if (cuts.empty()) continue;
            const std::size_t n_bins = cuts.size() + 1;
            hist_g_.assign(n_bins, 0.0);
            hist_h_.assign(n_bins, 0.0);
            hist_c_.assign(n_bins, 0);
            for (std::uint32_t i : samples) {
                const std::uint16_t b = data_.bin_of(i, f);
                hist_g_[b] += grad_[i];
                hist_h_[b] += hess_[i];
                ++hist_c_[b];
            }
            double gl = 0.0, hl = 0.0;
            std::size_t cl = 0;
            for (std::size_t b = 0; b + 1 < n_bins; ++b) {
                gl += hist_g_[b];
                hl += hist_h_[b];
                cl += hist_c_[b];
                const std::size_t cr = samples.size() - cl;
                if (cl < static_cast<std::size_t>(config_.min_samples_leaf) ||
                    cr < static_cast<std::size_t>(config_.min_samples_leaf)) {
                    continue;
                }
                const double gr = g_total - gl;
                const double hr = h_total - hl;
                const double gain =
                    0.5 * (score(gl, hl) + score(gr, hr) - score(g_total, h_total));
                // Ties keep the first candidate, so feature and bin
                // order fix the outcome.
                if (gain > kMinGain && gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.cut_index = b;
                }
            }
        }
        if (best.feature < 0) return;

        tree.nodes[node_index].feature = best.feature;
        tree.nodes[node_index].threshold = data_.cuts[best.feature][best.cut_index];
        tree.nodes[node_index].gain = best.gain;
        std::vector<std::uint32_t> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (std::uint32_t i : samples) {
            if (data_.bin_of(i, static_cast<std::size_t>(best.feature)) <=
                best.cut_index) {
                left.push_back(i);
            } else {
                right.push_back(i);
            }
        }
        samples.clear();
        samples.shrink_to_fit();

        const int left_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_index].left = left_index;
        tree.nodes[node_index].right = right_index;
        grow(tree, left_index, std::move(left), depth + 1);
        grow(tree, right_index, std::move(right), depth + 1);
    }

    const BinnedData& data_;
    const std::vector<double>& grad_;
    const std::vector<double>& hess_;
    const TrainConfig& config_;
    const std::vector<std::size_t>& allowed_;
    std::vector<double> hist_g_;
    std::vector<double> hist_h_;
    std::vector<std::size_t> hist_c_;
};

double tree_value_at(const Tree& tree, const double* x) {
    int idx = 0;
    while (tree.nodes[idx].feature >= 0) {
        const TreeNode& node = tree.nodes[idx];
        idx = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return tree.nodes[idx].value;
}

std::vector<std::size_t> choose_features(double subsample, std::uint64_t seed,
                                         std::uint64_t stream) {
    std::vector<std::size_t> all(features::kFeatureCount);
    std::iota(all.begin(), all.end(), 0);
    if (subsample >= 1.0) return all;
    std::size_t m = static_cast<std::size_t>(
        std::llround(subsample * static_cast<double>(features::kFeatureCount)));
    if (m < 1) m = 1;
    Rng rng = Rng::derive(seed, stream);
    rng.shuffle(all);
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
}

void softmax_row(const double* raw, std::size_t k, double* out) {
    double mx = raw[0];
    for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, raw[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = std::exp(raw[i] - mx);
        sum += out[i];
    }
    for (std::size_t i = 0; i < k; ++i) out[i] /= sum;
}

}  // namespace

TrainResult train(const std::vector<features::FeatureVector>& rows,
                  const TrainConfig& config) {
    validate(config);
    if (rows.empty()) {
        throw DataError("cannot train on an empty feature set");
    }
    const int n_classes = config.task.n_classes();
    const std::size_t n = rows.size();
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = label_for(config.task, rows[i]);
        if (labels[i] < 0 || labels[i] >= n_classes) {
            throw DataError("row " + rows[i].doc_id + " maps to label " +
                            std::to_string(labels[i]) + " outside 0.." +
                            std::to_string(n_classes - 1));
        }
    }

    TrainResult result;
    TreeEnsemble& m = result.model;
    m.task = config.task;
    m.config = config;
    m.n_classes = n_classes;
    const bool binary = config.task.kind == TaskKind::binary;
    m.n_outputs = binary ? 1 : n_classes;

    std::vector<std::size_t> class_counts(n_classes, 0);
    for (int y : labels) ++class_counts[y];
    int distinct = 0;
    for (std::size_t c : class_counts) distinct += c > 0 ? 1 : 0;

    m.base_scores.assign(m.n_outputs, 0.0);
    if (binary) {
        double mean = static_cast<double>(class_counts[1]) / static_cast<double>(n);
        mean = std::clamp(mean, kProbClamp, 1.0 - kProbClamp);
        m.base_scores[0] = std::log(mean / (1.0 - mean));
    } else {
        for (int c = 0; c < n_classes; ++c) {
            double prior = static_cast<double>(class_counts[c]) / static_cast<double>(n);
            m.base_scores[c] = std::log(std::max(prior, kProbClamp));
        }
    }

    if (distinct < 2) {
        result.warnings.push_back(
            "all rows share one label; trained a constant model");
        return result;
    }

    const BinnedData data = build_bins(rows, config.histogram_bins);
    const std::size_t n_outputs = static_cast<std::size_t>(m.n_outputs);
    std::vector<double> scores(n * n_outputs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n_outputs; ++k) {
            scores[i * n_outputs + k] = m.base_scores[k];
        }
    }

    std::vector<double> proba(n * n_outputs);
    std::vector<double> grad(n), hess(n);
    for (int round = 0; round < config.n_rounds; ++round) {
        if (binary) {
            for (std::size_t i = 0; i < n; ++i) proba[i] = sigmoid(scores[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                softmax_row(&scores[i * n_outputs], n_outputs, &proba[i * n_outputs]);
            }
        }
        for (std::size_t k = 0; k < n_outputs; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = proba[i * n_outputs + k];
                const double target =
                    binary ? static_cast<double>(labels[i])
                           : (labels[i] == static_cast<int>(k) ? 1.0 : 0.0);
                grad[i] = p - target;
                hess[i] = p * (1.0 - p);
            }
            const auto allowed = choose_features(
                config.feature_subsample, config.seed,
                static_cast<std::uint64_t>(round) * n_outputs + k);
            TreeBuilder builder(data, grad, hess, config, allowed);
            Tree tree = builder.build(static_cast<int>(k));
            for (std::size_t i = 0; i < n; ++i) {
                scores[i * n_outputs + k] += tree_value_at(tree, rows[i].values.data());
            }
            m.trees.push_back(std::move(tree));
        }
        double loss = 0.0;
        if (binary) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = std::clamp(sigmoid(scores[i]), kProbClamp,
                                            1.0 - kProbClamp);
                loss -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
            }
        } else {
            std::vector<double> row_p(n_outputs);
            for (std::size_t i = 0; i < n; ++i) {
                softmax_row(&scores[i * n_outputs], n_outputs, row_p.data());
                loss -= std::log(std::max(row_p[static_cast<std::size_t>(labels[i])],
                                          kProbClamp));
            }
        }
        result.round_train_loss.push_back(loss / static_cast<double>(n));
        ++m.n_rounds_trained;
    }
    return result;
}

std::vector<double> predict_raw(const TreeEnsemble& model,
                                const std::array<double, features::kFeatureCount>& x) {
    std::vector<double> raw(model.base_scores);
    for (const Tree& tree : model.trees) {
        raw[static_cast<std::size_t>(tree.output)] += tree_value_at(tree, x.data());
    }
    return raw;
}

std::vector<double> predict_proba(const TreeEnsemble& model,
                                  const std::array<double, features::kFeatureCount>& x) {
    const std::vector<double> raw = predict_raw(model, x);
    if (model.task.kind == TaskKind::binary) {
        const double p = sigmoid(raw[0]);
        return {1.0 - p, p};
    }
    std::vector<double> out(raw.size());
    softmax_row(raw.data(), raw.size(), out.data());
    return out;
}

int predict(const TreeEnsemble& model,
            const std::array<double, features::kFeatureCount>& x) {
    const std::vector<double> proba = predict_proba(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < proba.size(); ++c) {
        if (proba[c] > proba[best]) best = c;
    }
    return static_cast<int>(best);
}

const char* to_string(ImportanceMetric metric) {
    return metric == ImportanceMetric::accuracy ? "accuracy" : "f1_macro";
}

ImportanceReport gain_importance(const TreeEnsemble& model) {
    ImportanceReport report;
    report.gain.assign(features::kFeatureCount, 0.0);
    report.perm_mean.assign(features::kFeatureCount, 0.0);
    report.perm_std.assign(features::kFeatureCount, 0.0);
    double total = 0.0;
    for (const Tree& tree : model.trees) {
        for (const TreeNode& node : tree.nodes) {
            if (node.feature >= 0) {
                report.gain[static_cast<std::size_t>(node.feature)] += node.gain;
                total += node.gain;
            }
        }
    }
    if (total <= 0.0) {
        report.no_splits = true;
    } else {
        for (double& g : report.gain) g /= total;
    }
    std::vector<std::size_t> order(features::kFeatureCount);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.gain[a] > report.gain[b];
    });
    report.rank.assign(features::kFeatureCount, 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        report.rank[order[pos]] = static_cast<int>(pos + 1);
    }
    return report;
}

namespace {

double metric_value(ImportanceMetric metric, const std::vector<int>& y_true,
                    const std::vector<int>& y_pred, int n_classes) {
    const auto r = eval::confusion_and_f1(y_true, y_pred, n_classes);
    return metric == ImportanceMetric::accuracy ? r.accuracy : r.f1_macro;
}

}  // namespace

void permutation_importance(const TreeEnsemble& model,
                            const std::vector<features::FeatureVector>& rows,
                            ImportanceMetric metric, int repeats, std::uint64_t seed,
                            ImportanceReport* report) {
    if (rows.empty()) throw DataError("permutation importance needs at least one row");
    if (repeats < 1) throw ConfigError("permutation repeats must be >= 1");
    const std::size_t n = rows.size();
    std::vector<int> y_true(n);
    for (std::size_t i = 0; i < n; ++i) y_true[i] = label_for(model.task, rows[i]);

    std::vector<int> y_pred(n);
    for (std::size_t i = 0; i < n; ++i) y_pred[i] = predict(model, rows[i].values);
    const double baseline = metric_value(metric, y_true, y_pred, model.n_classes);

    report->metric = metric;
    report->repeats = repeats;
    report->perm_mean.assign(features::kFeatureCount, 0.0);
    report->perm_std.assign(features::kFeatureCount, 0.0);

    std::array<double, features::kFeatureCount> x;
    std::vector<double> deltas(static_cast<std::size_t>(repeats));
    for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng = Rng::derive(seed, f * static_cast<std::uint64_t>(repeats) +
                                            static_cast<std::uint64_t>(rep));
            const auto perm = rng.permutation(n);
            for (std::size_t i = 0; i < n; ++i) {
                x = rows[i].values;
                x[f] = rows[perm[i]].values[f];
                y_pred[i] = predict(model, x);
            }
            deltas[static_cast<std::size_t>(rep)] =
                baseline - metric_value(metric, y_true, y_pred, model.n_classes);
        }
        double mean = 0.0;
        for (double d : deltas) mean += d;
        mean /= static_cast<double>(repeats);
        double var = 0.0;
        for (double d : deltas) var += (d - mean) * (d - mean);
        var /= static_cast<double>(repeats);
        report->perm_mean[f] = mean;
        report->perm_std[f] = std::sqrt(var);
    }
}

PathContributions path_contributions(
    const TreeEnsemble& model, const std::array<double, features::kFeatureCount>& x) {
    PathContributions out;
    out.contributions.assign(static_cast<std::size_t>(model.n_outputs), {});
    out.bias = model.base_scores;
    for (const Tree& tree : model.trees) {
        const std::size_t k = static_cast<std::size_t>(tree.output);
        out.bias[k] += tree.nodes[0].value;
        int idx = 0;
        while (tree.nodes[idx].feature >= 0) {
            const TreeNode& node = tree.nodes[idx];
            const int next = x[node.feature] <= node.threshold ? node.left : node.right;
            out.contributions[k][static_cast<std::size_t>(node.feature)] +=
                tree.nodes[next].value - node.value;
            idx = next;
        }
    }
    return out;
}

std::string importance_report_json(const ImportanceReport& report,
                                   std::string_view config_hash) {
    const auto& names = features::feature_names();
    std::vector<std::size_t> order(features::kFeatureCount);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.rank[a] < report.rank[b];
    });
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t f : order) {
        rows.push_back({{"rank", report.rank[f]},
                        {"name", names[f]},
                        {"domain", features::to_string(features::feature_domain(f))},
                        {"gain", report.gain[f]},
                        {"perm_mean", report.perm_mean[f]},
                        {"perm_std", report.perm_std[f]}});
    }
    nlohmann::json j;
    j["version"] = "tempora.importance/1";
    j["metric"] = to_string(report.metric);
    j["repeats"] = report.repeats;
    j["no_splits"] = report.no_splits;
    j["attribution"] = "split gain + seeded permutation";
    if (!config_hash.empty()) j["config_hash"] = std::string(config_hash);
    j["features"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string to_json(const TreeEnsemble& model) {
    nlohmann::json j;
    j["version"] = kModelVersion;
    j["schema_version"] = model.schema_version;
    j["task"] = {{"kind", to_string(model.task.kind)},
                 {"threshold_year", model.task.threshold_year}};
    j["n_classes"] = model.n_classes;
    j["n_outputs"] = model.n_outputs;
    j["n_rounds_trained"] = model.n_rounds_trained;
    j["base_scores"] = model.base_scores;
    j["config"] = {{"n_rounds", model.config.n_rounds},
                   {"max_depth", model.config.max_depth},
                   {"learning_rate", model.config.learning_rate},
                   {"min_samples_leaf", model.config.min_samples_leaf},
                   {"feature_subsample", model.config.feature_subsample},
                   {"histogram_bins", model.config.histogram_bins},
                   {"seed", model.config.seed}};
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            if (node.feature < 0) {
                nodes.push_back({{"v", node.value}});
            } else {
                nodes.push_back({{"f", node.feature},
                                 {"t", node.threshold},
                                 {"l", node.left},
                                 {"r", node.right},
                                 {"v", node.value},
                                 {"g", node.gain}});
            }
        }
        trees.push_back({{"output", tree.output}, {"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j.dump() + "\n";
}

TreeEnsemble model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed model JSON: ") + e.what());
    }
    try {
        const std::string version = j.at("version").get<std::string>();
        if (version != kModelVersion) {
            throw ModelError("unsupported model version `" + version + "`");
        }
        TreeEnsemble m;
        m.schema_version = j.at("schema_version").get<std::string>();
        if (m.schema_version != features::kSchemaVersion) {
            throw ModelError("model was built against feature schema `" +
                             m.schema_version + "`, this build uses `" +
                             features::kSchemaVersion + "`");
        }
        const auto& tj = j.at("task");
        auto kind = task_from_string(tj.at("kind").get<std::string>());
        if (!kind) throw ModelError("unknown task kind in model file");
        m.task.kind = *kind;
        m.task.threshold_year = tj.at("threshold_year").get<int>();
        m.n_classes = j.at("n_classes").get<int>();
        m.n_outputs = j.at("n_outputs").get<int>();
        m.n_rounds_trained = j.at("n_rounds_trained").get<int>();
        m.base_scores = j.at("base_scores").get<std::vector<double>>();
        if (m.base_scores.size() != static_cast<std::size_t>(m.n_outputs)) {
            throw ModelError("base_scores length does not match n_outputs");
        }
        const auto& cj = j.at("config");
        m.config.task = m.task;
        m.config.n_rounds = cj.at("n_rounds").get<int>();
        m.config.max_depth = cj.at("max_depth").get<int>();
        m.config.learning_rate = cj.at("learning_rate").get<double>();
        m.config.min_samples_leaf = cj.at("min_samples_leaf").get<int>();
        m.config.feature_subsample = cj.at("feature_subsample").get<double>();
        m.config.histogram_bins = cj.at("histogram_bins").get<int>();
        m.config.seed = cj.at("seed").get<std::uint64_t>();
        for (const auto& tree_j : j.at("trees")) {
            Tree tree;
            tree.output = tree_j.at("output").get<int>();
            if (tree.output < 0 || tree.output >= m.n_outputs) {
                throw ModelError("tree output index out of range");
            }
            const auto& nodes_j = tree_j.at("nodes");
            for (const auto& node_j : nodes_j) {
                TreeNode node;
                node.value = node_j.at("v").get<double>();
                if (node_j.contains("f")) {
                    node.feature = node_j.at("f").get<int>();
                    node.threshold = node_j.at("t").get<double>();
                    node.left = node_j.at("l").get<int>();
                    node.right = node_j.at("r").get<int>();
                    node.gain = node_j.at("g").get<double>();
                    if (node.feature >= static_cast<int>(features::kFeatureCount) ||
                        !std::isfinite(node.threshold)) {
                        throw ModelError("split node is out of schema range");
                    }
                    if (node.left < 0 ||
                        node.left >= static_cast<int>(nodes_j.size()) ||
                        node.right < 0 ||
                        node.right >= static_cast<int>(nodes_j.size())) {
                        throw ModelError("tree child index out of range");
                    }
                }
                tree.nodes.push_back(node);
            }
            if (tree.nodes.empty()) throw ModelError("tree has no nodes");
            m.trees.push_back(std::move(tree));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("invalid model JSON: ") + e.what());
    }
}

namespace {

bool has_gz_suffix(const std::filesystem::path& path) {
    return path.extension() == ".gz";
}

// Deterministic gzip container: zeroed mtime, fixed OS byte.
std::string gzip_compress(const std::string& input) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw ModelError("deflateInit2 failed");
    }
    gz_header header{};
    header.time = 0;
    header.os = 3;
    deflateSetHeader(&zs, &header);
    std::string out;
    out.resize(deflateBound(&zs, static_cast<uLong>(input.size())));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
    zs.avail_in = static_cast<uInt>(input.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ModelError("gzip compression failed");
    out.resize(out.size() - zs.avail_out);
    return out;
}

std::string gzip_decompress(const std::string& input) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK) {
        throw ModelError("inflateInit2 failed");
    }
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
    zs.avail_in = static_cast<uInt>(input.size());
    std::string out;
    std::string chunk(1 << 16, '\0');
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ModelError("gzip decompression failed");
        }
        out.append(chunk.data(), chunk.size() - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw ModelError("truncated gzip stream");
        }
    }
    inflateEnd(&zs);
    return out;
}

}  // namespace

void save(const TreeEnsemble& model, const std::filesystem::path& path) {
    const std::string payload = to_json(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    if (has_gz_suffix(path)) {
        const std::string packed = gzip_compress(payload);
        out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    } else {
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
    if (!out) throw DataError("failed writing model file: " + path.string());
}

TreeEnsemble load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string raw = buf.str();
    if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
        static_cast<unsigned char>(raw[1]) == 0x8b) {
        raw = gzip_decompress(raw);
    }
    return model_from_json(raw);
}

}  // namespace tempora::model
