#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempora/corpus.hpp"
#include "tempora/features.hpp"
#include "tempora/model.hpp"

namespace tempora::eval {

struct ConfusionResult {
    std::vector<std::vector<std::uint64_t>> confusion;
    double accuracy = 0.0;
    // Unweighted mean over classes present in y_true.
    double f1_macro = 0.0;
    // Support-weighted mean over the same classes.
    double f1_weighted = 0.0;
};

ConfusionResult confusion_and_f1(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred, int n_classes);

// One-vs-rest AUC via average ranks, macro-averaged over classes with
// at least one positive and one negative sample.
double roc_auc_ovr_macro(const std::vector<int>& y_true,
                         const std::vector<std::vector<double>>& probas);

// Step-wise average precision, macro-averaged over classes with at
// least one positive sample. Ties rank by lower sample index.
double auprc_macro(const std::vector<int>& y_true,
                   const std::vector<std::vector<double>>& probas);

// Same per-class APs weighted by positive support instead of averaged
// uniformly. Off by default in reports; enabled via config.
double auprc_weighted(const std::vector<int>& y_true,
                      const std::vector<std::vector<double>>& probas);

// Errors in class-index units; rejects the binary scale.
std::pair<double, double> mae_rmse(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred,
                                   const LabelScale& scale);

// Correct at k when the true class is among the k most probable, ties
// resolved toward lower class indices.
std::map<int, double> topk_accuracy(const std::vector<int>& y_true,
                                    const std::vector<std::vector<double>>& probas,
                                    const std::vector<int>& ks);

struct MetricsReport {
    LabelScale task = LabelScale::century();
    std::size_t n_samples = 0;
    double accuracy = 0.0;
    double f1_macro = 0.0;
    double f1_weighted = 0.0;
    double aucroc_ovr_macro = 0.0;
    double auprc_macro = 0.0;
    // Filled only when the support-weighted variant is requested.
    std::optional<double> auprc_weighted;
    // Class-index units; absent for the binary task.
    std::optional<double> mae;
    std::optional<double> rmse;
    std::map<int, double> topk;
    std::vector<std::vector<std::uint64_t>> confusion;
};

// Scores every row under the model and assembles the full report;
// k = 1 is always included.
MetricsReport evaluate(const model::TreeEnsemble& model,
                       const std::vector<features::FeatureVector>& rows,
                       const std::vector<int>& ks,
                       bool with_weighted_auprc = false);

std::string metrics_json(const MetricsReport& report, std::string_view split_name,
                         std::string_view config_hash);
// Flat single-row CSV (header + row) for plotting.
std::string metrics_csv(const MetricsReport& report, std::string_view split_name);

struct SweepPoint {
    int threshold_year = 0;
    bool skipped = false;
    std::string note;
    double accuracy = 0.0;
    double f1_macro = 0.0;
    double aucroc = 0.0;
    // Fraction of all rows with year < threshold.
    double class_balance = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

// Retrains a fresh binary model per decade-aligned threshold on a
// stratified split of the relabeled rows and scores the held-out part.
// config.task is ignored; config.seed doubles as the split seed.
SweepResult threshold_sweep(const std::vector<features::FeatureVector>& rows,
                            const std::vector<int>& thresholds,
                            const model::TrainConfig& config);

std::string sweep_csv(const SweepResult& result);
std::string sweep_json(const SweepResult& result, std::string_view config_hash);

}  // namespace tempora::eval
