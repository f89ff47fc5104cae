#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempora/corpus.hpp"
#include "tempora/model.hpp"

namespace tempora::pipeline {

struct MarkovConfig {
    std::vector<int> orders = {1, 2};
    // Unset means 1/|A| once the reference alphabet is known.
    std::optional<double> alpha;
    std::size_t reference_budget_chars = 2'000'000;
};

struct TaskTrainConfig {
    int n_rounds = 300;
    int max_depth = 6;
    double learning_rate = 0.1;
    int min_samples_leaf = 5;
    double feature_subsample = 1.0;
    int histogram_bins = 64;
    std::uint64_t seed = 0;
};

struct PipelineConfig {
    std::filesystem::path config_path;
    // FNV-1a 64 of the config file bytes; stamped into every report.
    std::string config_hash;

    std::filesystem::path manifest;
    std::filesystem::path work_dir;
    corpus::SplitRatios ratios;
    std::uint64_t split_seed = 0;
    MarkovConfig markov;
    std::optional<std::filesystem::path> lexicon_path;
    TaskTrainConfig train_century;
    TaskTrainConfig train_decade;
    TaskTrainConfig train_binary;
    int binary_threshold_year = 1900;
    std::vector<int> sweep_thresholds;
    std::uint64_t sweep_seed = 0;
    // Task kind name -> top-k list.
    std::map<std::string, std::vector<int>> eval_topk;
    // Adds the support-weighted AUPRC next to the macro default.
    bool eval_auprc_weighted = false;
    model::ImportanceMetric importance_metric = model::ImportanceMetric::accuracy;
    int importance_repeats = 10;
    std::uint64_t importance_seed = 0;
};

std::string fnv1a_hex(std::string_view bytes);

// Parses and validates the JSON config; relative paths resolve against
// the config file's directory. All problems are reported in one
// ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

LabelScale task_scale(const PipelineConfig& config, TaskKind kind);
model::TrainConfig train_config(const PipelineConfig& config, TaskKind kind);

// Subcommand bodies. All are deterministic given the config and write
// only under work_dir; failures throw Config/Data/ModelError.
void cmd_split(const PipelineConfig& config, bool verbose);
void cmd_extract(const PipelineConfig& config, const std::string& split, int workers,
                 bool verbose);
void cmd_train(const PipelineConfig& config, TaskKind task, bool verbose);
void cmd_eval(const PipelineConfig& config, TaskKind task, const std::string& split,
              bool verbose);
void cmd_sweep(const PipelineConfig& config, bool verbose);
void cmd_importance(const PipelineConfig& config, TaskKind task, bool verbose);
// Prints the prediction JSON for one text file to stdout.
void cmd_predict(const PipelineConfig& config,
                 const std::filesystem::path& model_path,
                 const std::filesystem::path& input_path, bool verbose);

}  // namespace tempora::pipeline
