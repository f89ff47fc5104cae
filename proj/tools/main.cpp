// Command-line front end: parses flags, loads the config, dispatches to
// the pipeline, and maps failures onto documented exit codes.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tempora/errors.hpp"
#include "tempora/pipeline.hpp"

namespace {

tempora::TaskKind parse_task(const std::string& name) {
    const auto kind = tempora::task_from_string(name);
    if (!kind) {
        throw tempora::ConfigError("unknown task `" + name +
                                   "`; expected century, decade, or binary");
    }
    return *kind;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tempora: date English texts by century, decade, or era"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    int workers = 1;
    bool verbose = false;
    app.add_option("--config", config_path, "pipeline config (JSON)")
        ->required();
    app.add_option("--workers", workers, "worker threads for feature extraction")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", verbose, "progress notes on stderr");

    auto* split_cmd =
        app.add_subcommand("split", "partition the manifest into train/validation/test");

    auto* extract_cmd =
        app.add_subcommand("extract", "compute feature vectors for one split");
    std::string extract_split;
    extract_cmd->add_option("--split", extract_split, "train, validation, or test")
        ->required();

    auto* train_cmd = app.add_subcommand("train", "fit a boosted-tree model");
    std::string train_task;
    train_cmd->add_option("--task", train_task, "century, decade, or binary")
        ->required();

    auto* eval_cmd = app.add_subcommand("eval", "score a trained model on a split");
    std::string eval_task;
    std::string eval_split = "test";
    eval_cmd->add_option("--task", eval_task, "century, decade, or binary")
        ->required();
    eval_cmd->add_option("--split", eval_split, "split to score (default test)");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "binary accuracy across decade thresholds");

    auto* importance_cmd =
        app.add_subcommand("importance", "gain and permutation feature importance");
    std::string importance_task;
    importance_cmd->add_option("--task", importance_task, "century, decade, or binary")
        ->required();

    auto* predict_cmd =
        app.add_subcommand("predict", "classify one text file, JSON to stdout");
    std::string predict_model;
    std::string predict_input;
    predict_cmd->add_option("--model", predict_model,
                            "model file (default: the century model in work_dir)");
    predict_cmd->add_option("--input", predict_input, "UTF-8 text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const auto config = tempora::pipeline::load_config(config_path);
        if (split_cmd->parsed()) {
            tempora::pipeline::cmd_split(config, verbose);
        } else if (extract_cmd->parsed()) {
            tempora::pipeline::cmd_extract(config, extract_split, workers, verbose);
        } else if (train_cmd->parsed()) {
            tempora::pipeline::cmd_train(config, parse_task(train_task), verbose);
        } else if (eval_cmd->parsed()) {
            tempora::pipeline::cmd_eval(config, parse_task(eval_task), eval_split,
                                        verbose);
        } else if (sweep_cmd->parsed()) {
            tempora::pipeline::cmd_sweep(config, verbose);
        } else if (importance_cmd->parsed()) {
            tempora::pipeline::cmd_importance(config, parse_task(importance_task),
                                              verbose);
        } else if (predict_cmd->parsed()) {
            const std::filesystem::path model_path =
                predict_model.empty() ? config.work_dir / "models" / "century.json"
                                      : std::filesystem::path(predict_model);
            tempora::pipeline::cmd_predict(config, model_path, predict_input, verbose);
        }
        return 0;
    } catch (const tempora::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tempora::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const tempora::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
