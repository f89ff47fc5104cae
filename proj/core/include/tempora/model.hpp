#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tempora/corpus.hpp"
#include "tempora/features.hpp"

namespace tempora::model {

struct TrainConfig {
    LabelScale task = LabelScale::century();
    int n_rounds = 300;
    int max_depth = 6;
    double learning_rate = 0.1;
    int min_samples_leaf = 5;
    double feature_subsample = 1.0;
    int histogram_bins = 64;
    std::uint64_t seed = 0;
};

// Throws ConfigError when any hyperparameter is out of range.
void validate(const TrainConfig& config);

// Binary-tree node; feature = -1 marks a leaf. Every node carries the
// regression value its sample set would receive, which makes
// decision-path attributions exact.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double gain = 0.0;
};

struct Tree {
    int output = 0;
    std::vector<TreeNode> nodes;
};

// Additive model: raw score for output k = base_scores[k] + sum of
// that output's tree values. Multiclass trains one tree per class per
// round under softmax cross-entropy; binary trains one logistic tree
// per round.
struct TreeEnsemble {
    std::string schema_version = features::kSchemaVersion;
    LabelScale task = LabelScale::century();
    int n_classes = 0;
    int n_outputs = 0;
    std::vector<double> base_scores;
    TrainConfig config;
    int n_rounds_trained = 0;
    std::vector<Tree> trees;
};

// The label a training/evaluation row carries under the given task.
// Century and decade tasks require the row year inside 1600-2029.
int label_for(const LabelScale& task, const features::FeatureVector& row);

struct TrainResult {
    TreeEnsemble model;
    // Mean training log-loss after each boosting round.
    std::vector<double> round_train_loss;
    std::vector<std::string> warnings;
};

TrainResult train(const std::vector<features::FeatureVector>& rows,
                  const TrainConfig& config);

std::vector<double> predict_raw(const TreeEnsemble& model,
                                const std::array<double, features::kFeatureCount>& x);
std::vector<double> predict_proba(const TreeEnsemble& model,
                                  const std::array<double, features::kFeatureCount>& x);
// Argmax of predict_proba; ties resolve to the lowest class index.
int predict(const TreeEnsemble& model,
            const std::array<double, features::kFeatureCount>& x);

enum class ImportanceMetric { accuracy, f1_macro };

const char* to_string(ImportanceMetric metric);

struct ImportanceReport {
    // Index-aligned with the feature schema.
    std::vector<double> gain;
    std::vector<double> perm_mean;
    std::vector<double> perm_std;
    // 1-based rank by gain (permutation mean as tie-break source when
    // gain is absent).
    std::vector<int> rank;
    bool no_splits = false;
    ImportanceMetric metric = ImportanceMetric::accuracy;
    int repeats = 0;
};

// Per-feature split-gain totals normalized to sum 1; all zeros and
// no_splits for a constant model.
ImportanceReport gain_importance(const TreeEnsemble& model);

// Baseline metric minus the metric after shuffling one feature column,
// repeated with independent seeded permutations per (feature, repeat).
// Fills the permutation fields of an existing gain report.
void permutation_importance(const TreeEnsemble& model,
                            const std::vector<features::FeatureVector>& rows,
                            ImportanceMetric metric, int repeats, std::uint64_t seed,
                            ImportanceReport* report);

// Per-output additive attributions: contributions[k][f] summed with
// bias[k] reproduce predict_raw within 1e-6.
struct PathContributions {
    std::vector<std::array<double, features::kFeatureCount>> contributions;
    std::vector<double> bias;
};

PathContributions path_contributions(const TreeEnsemble& model,
                                     const std::array<double, features::kFeatureCount>& x);

// Importance rows sorted by rank: {name, domain, gain, perm_mean,
// perm_std}. Labels the attribution method and flags constant models.
std::string importance_report_json(const ImportanceReport& report,
                                   std::string_view config_hash);

std::string to_json(const TreeEnsemble& model);
TreeEnsemble model_from_json(const std::string& json_text);

// Paths ending in .gz write/read gzip-compressed JSON.
void save(const TreeEnsemble& model, const std::filesystem::path& path);
TreeEnsemble load(const std::filesystem::path& path);

}  // namespace tempora::model
