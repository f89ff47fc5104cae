#include "tempora/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "tempora/errors.hpp"

namespace tempora::eval {

namespace {

void check_labels(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                  int n_classes) {
    if (y_true.empty()) throw DataError("cannot score an empty label vector");
    if (y_true.size() != y_pred.size()) {
        throw DataError("label vectors differ in length");
    }
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 ||
            y_pred[i] >= n_classes) {
            throw DataError("label outside 0.." + std::to_string(n_classes - 1) +
                            " at row " + std::to_string(i));
        }
    }
}

void check_probas(const std::vector<int>& y_true,
                  const std::vector<std::vector<double>>& probas) {
    if (y_true.empty()) throw DataError("cannot score an empty label vector");
    if (y_true.size() != probas.size()) {
        throw DataError("probability matrix does not match label count");
    }
    const std::size_t k = probas.front().size();
    for (std::size_t i = 0; i < probas.size(); ++i) {
        if (probas[i].size() != k) {
            throw DataError("ragged probability matrix at row " + std::to_string(i));
        }
        double sum = 0.0;
        for (double p : probas[i]) sum += p;
        if (std::abs(sum - 1.0) > 1e-6) {
            throw DataError("probability row " + std::to_string(i) +
                            " sums to " + std::to_string(sum));
        }
        if (y_true[i] < 0 || y_true[i] >= static_cast<int>(k)) {
            throw DataError("label outside the probability width at row " +
                            std::to_string(i));
        }
    }
}

std::string format_value(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

ConfusionResult confusion_and_f1(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred, int n_classes) {
    if (n_classes < 1) throw ConfigError("n_classes must be >= 1");
    check_labels(y_true, y_pred, n_classes);
    ConfusionResult out;
    out.confusion.assign(static_cast<std::size_t>(n_classes),
                         std::vector<std::uint64_t>(static_cast<std::size_t>(n_classes), 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ++out.confusion[static_cast<std::size_t>(y_true[i])]
                       [static_cast<std::size_t>(y_pred[i])];
    }
    const double n = static_cast<double>(y_true.size());
    std::uint64_t trace = 0;
    for (int c = 0; c < n_classes; ++c) {
        trace += out.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    }
    out.accuracy = static_cast<double>(trace) / n;

    double macro_sum = 0.0;
    double weighted_sum = 0.0;
    std::size_t present = 0;
    for (int c = 0; c < n_classes; ++c) {
        const std::size_t ci = static_cast<std::size_t>(c);
        std::uint64_t support = 0, predicted = 0;
        for (int o = 0; o < n_classes; ++o) {
            support += out.confusion[ci][static_cast<std::size_t>(o)];
            predicted += out.confusion[static_cast<std::size_t>(o)][ci];
        }
        if (support == 0) continue;
        const double tp = static_cast<double>(out.confusion[ci][ci]);
        const double precision =
            predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double recall = tp / static_cast<double>(support);
        const double f1 = precision + recall == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        macro_sum += f1;
        weighted_sum += f1 * static_cast<double>(support);
        ++present;
    }
    out.f1_macro = present == 0 ? 0.0 : macro_sum / static_cast<double>(present);
    out.f1_weighted = weighted_sum / n;
    return out;
}

double roc_auc_ovr_macro(const std::vector<int>& y_true,
                         const std::vector<std::vector<double>>& probas) {
    check_probas(y_true, probas);
    const std::size_t n = y_true.size();
    const std::size_t n_classes = probas.front().size();
    double sum = 0.0;
    std::size_t valid = 0;
    std::vector<std::size_t> order(n);
    std::vector<double> ranks(n);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::size_t pos = 0;
        for (int y : y_true) pos += y == static_cast<int>(c) ? 1 : 0;
        const std::size_t neg = n - pos;
        if (pos == 0 || neg == 0) continue;

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probas[a][c] < probas[b][c];
        });
        // Average ranks across ties, 1-based.
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && probas[order[j + 1]][c] == probas[order[i]][c]) ++j;
            const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
            i = j + 1;
        }
        double rank_sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (y_true[t] == static_cast<int>(c)) rank_sum += ranks[t];
        }
        const double p = static_cast<double>(pos);
        const double auc = (rank_sum - p * (p + 1.0) / 2.0) /
                           (p * static_cast<double>(neg));
        sum += auc;
        ++valid;
    }
    if (valid == 0) {
        throw DataError("no class has both positive and negative samples");
    }
    return sum / static_cast<double>(valid);
}

namespace {

// Per-class step-wise average precision with its positive support;
// classes without positives are omitted.
std::vector<std::pair<double, std::size_t>> average_precisions(
    const std::vector<int>& y_true, const std::vector<std::vector<double>>& probas) {
    check_probas(y_true, probas);
    const std::size_t n = y_true.size();
    const std::size_t n_classes = probas.front().size();
    std::vector<std::pair<double, std::size_t>> out;
    std::vector<std::size_t> order(n);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::size_t pos = 0;
        for (int y : y_true) pos += y == static_cast<int>(c) ? 1 : 0;
        if (pos == 0) continue;

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probas[a][c] > probas[b][c];
        });
        double ap = 0.0;
        std::size_t hits = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (y_true[order[k]] == static_cast<int>(c)) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(k + 1);
            }
        }
        out.emplace_back(ap / static_cast<double>(pos), pos);
    }
    if (out.empty()) throw DataError("no class has a positive sample");
    return out;
}

}  // namespace

double auprc_macro(const std::vector<int>& y_true,
                   const std::vector<std::vector<double>>& probas) {
    const auto aps = average_precisions(y_true, probas);
    double sum = 0.0;
    for (const auto& [ap, support] : aps) sum += ap;
    return sum / static_cast<double>(aps.size());
}

double auprc_weighted(const std::vector<int>& y_true,
                      const std::vector<std::vector<double>>& probas) {
    const auto aps = average_precisions(y_true, probas);
    double sum = 0.0;
    std::size_t total = 0;
    for (const auto& [ap, support] : aps) {
        sum += ap * static_cast<double>(support);
        total += support;
    }
    return sum / static_cast<double>(total);
}

std::pair<double, double> mae_rmse(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred,
                                   const LabelScale& scale) {
    if (scale.kind == TaskKind::binary) {
        throw ConfigError("MAE/RMSE are reported only for multiclass tasks");
    }
    check_labels(y_true, y_pred, scale.n_classes());
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double d = static_cast<double>(y_pred[i]) - static_cast<double>(y_true[i]);
        abs_sum += std::abs(d);
        sq_sum += d * d;
    }
    const double n = static_cast<double>(y_true.size());
    return {abs_sum / n, std::sqrt(sq_sum / n)};
}

std::map<int, double> topk_accuracy(const std::vector<int>& y_true,
                                    const std::vector<std::vector<double>>& probas,
                                    const std::vector<int>& ks) {
    check_probas(y_true, probas);
    const std::size_t n = y_true.size();
    const int n_classes = static_cast<int>(probas.front().size());
    for (int k : ks) {
        if (k < 1 || k > n_classes) {
            throw ConfigError("top-k value " + std::to_string(k) +
                              " outside 1.." + std::to_string(n_classes));
        }
    }
    std::map<int, double> out;
    if (ks.empty()) return out;
    std::vector<std::size_t> order(static_cast<std::size_t>(n_classes));
    // rank_of[i][c] = position of class c in sample i's ordering.
    std::vector<std::vector<int>> rank_of(n,
                                          std::vector<int>(static_cast<std::size_t>(n_classes)));
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probas[i][a] > probas[i][b];
        });
        for (int pos = 0; pos < n_classes; ++pos) {
            rank_of[i][order[static_cast<std::size_t>(pos)]] = pos;
        }
    }
    for (int k : ks) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (rank_of[i][static_cast<std::size_t>(y_true[i])] < k) ++correct;
        }
        out[k] = static_cast<double>(correct) / static_cast<double>(n);
    }
    return out;
}

MetricsReport evaluate(const model::TreeEnsemble& m,
                       const std::vector<features::FeatureVector>& rows,
                       const std::vector<int>& ks, bool with_weighted_auprc) {
    if (rows.empty()) throw DataError("cannot evaluate on an empty split");
    MetricsReport report;
    report.task = m.task;
    report.n_samples = rows.size();

    std::vector<int> y_true(rows.size());
    std::vector<int> y_pred(rows.size());
    std::vector<std::vector<double>> probas(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        y_true[i] = model::label_for(m.task, rows[i]);
        probas[i] = model::predict_proba(m, rows[i].values);
        std::size_t best = 0;
        for (std::size_t c = 1; c < probas[i].size(); ++c) {
            if (probas[i][c] > probas[i][best]) best = c;
        }
        y_pred[i] = static_cast<int>(best);
    }
    const auto cf = confusion_and_f1(y_true, y_pred, m.n_classes);
    report.accuracy = cf.accuracy;
    report.f1_macro = cf.f1_macro;
    report.f1_weighted = cf.f1_weighted;
    report.confusion = cf.confusion;
    report.aucroc_ovr_macro = roc_auc_ovr_macro(y_true, probas);
    report.auprc_macro = eval::auprc_macro(y_true, probas);
    if (with_weighted_auprc) {
        report.auprc_weighted = eval::auprc_weighted(y_true, probas);
    }
    if (m.task.kind != TaskKind::binary) {
        const auto [mae, rmse] = mae_rmse(y_true, y_pred, m.task);
        report.mae = mae;
        report.rmse = rmse;
    }
    std::vector<int> all_ks = ks;
    all_ks.push_back(1);
    std::sort(all_ks.begin(), all_ks.end());
    all_ks.erase(std::unique(all_ks.begin(), all_ks.end()), all_ks.end());
    report.topk = topk_accuracy(y_true, probas, all_ks);
    return report;
}

std::string metrics_json(const MetricsReport& report, std::string_view split_name,
                         std::string_view config_hash) {
    nlohmann::json j;
    j["version"] = "tempora.metrics/1";
    j["task"] = report.task.describe();
    j["split"] = std::string(split_name);
    j["n_samples"] = report.n_samples;
    j["accuracy"] = report.accuracy;
    j["f1_macro"] = report.f1_macro;
    j["f1_weighted"] = report.f1_weighted;
    j["aucroc_ovr_macro"] = report.aucroc_ovr_macro;
    j["auprc_macro"] = report.auprc_macro;
    if (report.auprc_weighted) j["auprc_weighted"] = *report.auprc_weighted;
    if (report.mae) {
        j["mae"] = *report.mae;
        j["rmse"] = *report.rmse;
        const double per_class_years =
            report.task.kind == TaskKind::century ? 100.0 : 10.0;
        j["mae_years_approx"] = *report.mae * per_class_years;
        j["rmse_years_approx"] = *report.rmse * per_class_years;
    } else {
        j["mae"] = nullptr;
        j["rmse"] = nullptr;
    }
    nlohmann::json topk = nlohmann::json::object();
    for (const auto& [k, v] : report.topk) topk[std::to_string(k)] = v;
    j["topk"] = std::move(topk);
    j["confusion_matrix"] = report.confusion;
    nlohmann::json class_names = nlohmann::json::array();
    for (int c = 0; c < report.task.n_classes(); ++c) {
        class_names.push_back(report.task.class_name(c));
    }
    j["class_names"] = std::move(class_names);
    if (!config_hash.empty()) j["config_hash"] = std::string(config_hash);
    return j.dump(2) + "\n";
}

std::string metrics_csv(const MetricsReport& report, std::string_view split_name) {
    std::string header = "task,split,n_samples,accuracy,f1_macro,f1_weighted,"
                         "aucroc_ovr_macro,auprc_macro,mae,rmse";
    std::string row = report.task.describe();
    row += ',';
    row += std::string(split_name);
    row += ',';
    row += std::to_string(report.n_samples);
    for (double v : {report.accuracy, report.f1_macro, report.f1_weighted,
                     report.aucroc_ovr_macro, report.auprc_macro}) {
        row += ',';
        row += format_value(v);
    }
    row += ',';
    row += report.mae ? format_value(*report.mae) : "";
    row += ',';
    row += report.rmse ? format_value(*report.rmse) : "";
    for (const auto& [k, v] : report.topk) {
        header += ",topk_" + std::to_string(k);
        row += ',';
        row += format_value(v);
    }
    return header + "\n" + row + "\n";
}

SweepResult threshold_sweep(const std::vector<features::FeatureVector>& rows,
                            const std::vector<int>& thresholds,
                            const model::TrainConfig& config) {
    if (rows.empty()) throw DataError("cannot sweep an empty feature set");
    if (thresholds.empty()) throw ConfigError("threshold sweep needs thresholds");
    std::vector<int> ts = thresholds;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (int t : ts) {
        if (t % 10 != 0 || t < 1610 || t > 2010) {
            throw ConfigError("sweep threshold " + std::to_string(t) +
                              " must be a decade year within 1610..2010");
        }
    }

    SweepResult result;
    std::size_t usable = 0;
    for (int t : ts) {
        SweepPoint point;
        point.threshold_year = t;
        std::vector<int> labels(rows.size());
        std::size_t old_count = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            labels[i] = rows[i].year < t ? 0 : 1;
            old_count += labels[i] == 0 ? 1 : 0;
        }
        point.class_balance =
            static_cast<double>(old_count) / static_cast<double>(rows.size());
        if (old_count == 0 || old_count == rows.size()) {
            point.skipped = true;
            point.note = "every document falls on one side of the threshold";
            result.points.push_back(std::move(point));
            continue;
        }

        const auto assignment = corpus::stratified_assignment(
            labels, corpus::SplitRatios{}, config.seed, nullptr);
        std::vector<features::FeatureVector> train_rows, heldout_rows;
        std::vector<int> heldout_labels;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (assignment[i] == 0) {
                train_rows.push_back(rows[i]);
            } else {
                heldout_rows.push_back(rows[i]);
                heldout_labels.push_back(labels[i]);
            }
        }
        const bool heldout_both =
            !heldout_labels.empty() &&
            std::count(heldout_labels.begin(), heldout_labels.end(), 0) > 0 &&
            std::count(heldout_labels.begin(), heldout_labels.end(), 1) > 0;
        if (train_rows.empty() || !heldout_both) {
            point.skipped = true;
            point.note = "split leaves no held-out representation of both classes";
            result.points.push_back(std::move(point));
            continue;
        }

        model::TrainConfig tc = config;
        tc.task = LabelScale::binary(t);
        const auto trained = model::train(train_rows, tc);
        std::vector<int> y_pred(heldout_rows.size());
        std::vector<std::vector<double>> probas(heldout_rows.size());
        for (std::size_t i = 0; i < heldout_rows.size(); ++i) {
            probas[i] = model::predict_proba(trained.model, heldout_rows[i].values);
            y_pred[i] = probas[i][1] > probas[i][0] ? 1 : 0;
        }
        const auto cf = confusion_and_f1(heldout_labels, y_pred, 2);
        point.accuracy = cf.accuracy;
        point.f1_macro = cf.f1_macro;
        point.aucroc = roc_auc_ovr_macro(heldout_labels, probas);
        result.points.push_back(std::move(point));
        ++usable;
    }
    if (usable == 0) {
        throw DataError("every sweep threshold was skipped");
    }
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "threshold_year,accuracy,f1_macro,aucroc,class_balance\n";
    for (const auto& p : result.points) {
        if (p.skipped) continue;
        out += std::to_string(p.threshold_year);
        for (double v : {p.accuracy, p.f1_macro, p.aucroc, p.class_balance}) {
            out += ',';
            out += format_value(v);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_json(const SweepResult& result, std::string_view config_hash) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        nlohmann::json pj;
        pj["threshold_year"] = p.threshold_year;
        pj["skipped"] = p.skipped;
        pj["class_balance"] = p.class_balance;
        if (p.skipped) {
            pj["note"] = p.note;
        } else {
            pj["accuracy"] = p.accuracy;
            pj["f1_macro"] = p.f1_macro;
            pj["aucroc"] = p.aucroc;
        }
        points.push_back(std::move(pj));
    }
    nlohmann::json j;
    j["version"] = "tempora.sweep/1";
    if (!config_hash.empty()) j["config_hash"] = std::string(config_hash);
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

}  // namespace tempora::eval
