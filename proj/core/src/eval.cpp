#include "cvsskit/eval.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

std::string fixed4(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

void check_aligned(std::size_t preds, std::size_t truths) {
    if (preds != truths) {
        throw LengthMismatch("predictions (" + std::to_string(preds) + ") and truths (" +
                             std::to_string(truths) + ") are not aligned");
    }
}

} // namespace

std::array<ComponentCounts, kComponentCount> component_counts(
    const std::vector<PredictedVector>& preds, const std::vector<CvssVector>& truths) {
    check_aligned(preds.size(), truths.size());
    std::array<ComponentCounts, kComponentCount> counts{};
    for (std::size_t row = 0; row < preds.size(); ++row) {
        for (Component comp : kAllComponents) {
            ComponentCounts& c = counts[static_cast<std::size_t>(comp)];
            ++c.n;
            const auto& label = preds[row].at(comp).label;
            if (!label) {
                ++c.abstain;
            } else if (*label == truths[row].label(comp)) {
                ++c.correct;
            }
        }
    }
    return counts;
}

std::array<double, kComponentCount> component_accuracy(const std::vector<PredictedVector>& preds,
                                                       const std::vector<CvssVector>& truths,
                                                       AbstainPolicy policy) {
    const auto counts = component_counts(preds, truths);
    std::array<double, kComponentCount> accuracy{};
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        const ComponentCounts& c = counts[i];
        const std::size_t denom = policy == AbstainPolicy::CountAsWrong ? c.n : c.n - c.abstain;
        accuracy[i] = denom == 0 ? 0.0 : static_cast<double>(c.correct) / static_cast<double>(denom);
    }
    return accuracy;
}

double mean_accuracy(const std::array<double, kComponentCount>& per_component) {
    double sum = 0.0;
    for (double v : per_component) {
        sum += v;
    }
    return sum / static_cast<double>(kComponentCount);
}

double mean_accuracy(const std::map<std::string, double>& per_component) {
    std::array<double, kComponentCount> values{};
    for (Component comp : kAllComponents) {
        const auto it = per_component.find(std::string(component_name(comp)));
        if (it == per_component.end()) {
            throw MissingComponent("mean accuracy needs all 8 components, missing " +
                                   std::string(component_name(comp)));
        }
        values[static_cast<std::size_t>(comp)] = it->second;
    }
    return mean_accuracy(values);
}

ScoreMetrics regression_metrics(const std::vector<std::optional<double>>& pred_scores,
                                const std::vector<double>& truth_scores) {
    check_aligned(pred_scores.size(), truth_scores.size());
    ScoreMetrics metrics;
    double squared = 0.0;
    double absolute = 0.0;
    for (std::size_t i = 0; i < pred_scores.size(); ++i) {
        if (!pred_scores[i]) {
            continue;
        }
        const double err = *pred_scores[i] - truth_scores[i];
        squared += err * err;
        absolute += std::abs(err);
        ++metrics.n_scored;
    }
    if (metrics.n_scored == 0) {
        throw NothingScoreable("no scoreable prediction/truth pairs");
    }
    metrics.mse = squared / static_cast<double>(metrics.n_scored);
    metrics.mae = absolute / static_cast<double>(metrics.n_scored);
    return metrics;
}

EvalReport evaluate(const std::vector<PredictedVector>& preds,
                    const std::vector<CvssVector>& truths, const std::vector<double>& truth_scores,
                    RunMetadata metadata) {
    check_aligned(preds.size(), truths.size());
    EvalReport report;
    report.has_accuracy = true;
    report.n = preds.size();
    report.counts = component_counts(preds, truths);
    report.per_component_accuracy = component_accuracy(preds, truths, AbstainPolicy::CountAsWrong);
    report.per_component_accuracy_excl = component_accuracy(preds, truths, AbstainPolicy::Exclude);
    report.mean_accuracy = mean_accuracy(report.per_component_accuracy);
    report.mean_accuracy_excl = mean_accuracy(report.per_component_accuracy_excl);
    report.run_metadata = std::move(metadata);

    if (!truth_scores.empty()) {
        check_aligned(preds.size(), truth_scores.size());
        std::vector<std::optional<double>> pred_scores;
        pred_scores.reserve(preds.size());
        for (const PredictedVector& pred : preds) {
            pred_scores.push_back(pred.base);
        }
        try {
            report.score_metrics = regression_metrics(pred_scores, truth_scores);
        } catch (const NothingScoreable&) {
            report.score_metrics.reset();
        }
    }
    return report;
}

EvalReport evaluate_scores(const std::vector<std::optional<double>>& pred_scores,
                           const std::vector<double>& truth_scores, RunMetadata metadata) {
    EvalReport report;
    report.has_accuracy = false;
    report.n = pred_scores.size();
    report.score_metrics = regression_metrics(pred_scores, truth_scores);
    report.run_metadata = std::move(metadata);
    return report;
}

ReportFormat report_format_from_name(std::string_view name) {
    if (name == "json") {
        return ReportFormat::Json;
    }
    if (name == "csv") {
        return ReportFormat::Csv;
    }
    if (name == "md") {
        return ReportFormat::Md;
    }
    throw ConfigError("unknown report format: " + std::string(name));
}

std::string report_to_json(const EvalReport& report) {
    json out;
    out["n"] = report.n;
    out["has_accuracy"] = report.has_accuracy;
    if (report.has_accuracy) {
        json acc, acc_excl, abstains, counts;
        for (Component comp : kAllComponents) {
            const auto i = static_cast<std::size_t>(comp);
            const std::string name(component_name(comp));
            acc[name] = report.per_component_accuracy[i];
            acc_excl[name] = report.per_component_accuracy_excl[i];
            abstains[name] = report.counts[i].abstain;
            counts[name] = {{"n", report.counts[i].n},
                            {"correct", report.counts[i].correct},
                            {"abstain", report.counts[i].abstain}};
        }
        out["per_component_accuracy"] = acc;
        out["per_component_accuracy_excluding_abstain"] = acc_excl;
        out["mean_accuracy"] = report.mean_accuracy;
        out["mean_accuracy_excluding_abstain"] = report.mean_accuracy_excl;
        out["abstain_counts"] = abstains;
        out["counts"] = counts;
    }
    if (report.score_metrics) {
        out["score_metrics"] = {{"mse", report.score_metrics->mse},
                                {"mae", report.score_metrics->mae},
                                {"n_scored", report.score_metrics->n_scored}};
    }
    out["run_metadata"] = {{"predictor", report.run_metadata.predictor},
                           {"variant", report.run_metadata.variant},
                           {"routing", report.run_metadata.routing},
                           {"dataset_hash", report.run_metadata.dataset_hash}};
    return out.dump(2);
}

EvalReport report_from_json(const std::string& text) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw IoError("malformed report JSON");
    }
    EvalReport report;
    report.n = doc.at("n").get<std::size_t>();
    report.has_accuracy = doc.at("has_accuracy").get<bool>();
    if (report.has_accuracy) {
        for (Component comp : kAllComponents) {
            const auto i = static_cast<std::size_t>(comp);
            const std::string name(component_name(comp));
            report.per_component_accuracy[i] = doc.at("per_component_accuracy").at(name).get<double>();
            report.per_component_accuracy_excl[i] =
                doc.at("per_component_accuracy_excluding_abstain").at(name).get<double>();
            const json& counts = doc.at("counts").at(name);
            report.counts[i].n = counts.at("n").get<std::size_t>();
            report.counts[i].correct = counts.at("correct").get<std::size_t>();
            report.counts[i].abstain = counts.at("abstain").get<std::size_t>();
        }
        report.mean_accuracy = doc.at("mean_accuracy").get<double>();
        report.mean_accuracy_excl = doc.at("mean_accuracy_excluding_abstain").get<double>();
    }
    if (doc.contains("score_metrics")) {
        ScoreMetrics metrics;
        metrics.mse = doc["score_metrics"].at("mse").get<double>();
        metrics.mae = doc["score_metrics"].at("mae").get<double>();
        metrics.n_scored = doc["score_metrics"].at("n_scored").get<std::size_t>();
        report.score_metrics = metrics;
    }
    if (doc.contains("run_metadata")) {
        report.run_metadata.predictor = doc["run_metadata"].value("predictor", "");
        report.run_metadata.variant = doc["run_metadata"].value("variant", "");
        report.run_metadata.routing = doc["run_metadata"].value("routing", "");
        report.run_metadata.dataset_hash = doc["run_metadata"].value("dataset_hash", "");
    }
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    std::string out = "row,accuracy,accuracy_excluding_abstain,correct,abstain,n\n";
    for (Component comp : kAllComponents) {
        const auto i = static_cast<std::size_t>(comp);
        out += std::string(component_name(comp)) + ",";
        if (report.has_accuracy) {
            out += fixed4(report.per_component_accuracy[i]) + "," +
                   fixed4(report.per_component_accuracy_excl[i]) + "," +
                   std::to_string(report.counts[i].correct) + "," +
                   std::to_string(report.counts[i].abstain) + "," +
                   std::to_string(report.counts[i].n);
        } else {
            out += ",,,,";
        }
        out += '\n';
    }
    out += "mean,";
    if (report.has_accuracy) {
        out += fixed4(report.mean_accuracy) + "," + fixed4(report.mean_accuracy_excl) + ",,," +
               std::to_string(report.n);
    } else {
        out += ",,,," + std::to_string(report.n);
    }
    out += '\n';
    out += "score_mse_mae,";
    if (report.score_metrics) {
        out += fixed4(report.score_metrics->mse) + "," + fixed4(report.score_metrics->mae) +
               ",,," + std::to_string(report.score_metrics->n_scored);
    } else {
        out += ",,,,";
    }
    out += '\n';
    return out;
}

std::string report_to_md(const EvalReport& report) {
    std::string out;
    if (report.has_accuracy) {
        out += "| Predictor | AV | AC | PR | UI | S | C | I | A |\n";
        out += "|---|---|---|---|---|---|---|---|---|\n";
        out += "| " + (report.run_metadata.predictor.empty() ? std::string("run")
                                                             : report.run_metadata.predictor);
        for (Component comp : kAllComponents) {
            out += " | " + fixed4(report.per_component_accuracy[static_cast<std::size_t>(comp)]);
        }
        out += " |\n\n";
        out += "Mean accuracy: " + fixed4(report.mean_accuracy) + " (excluding abstains: " +
               fixed4(report.mean_accuracy_excl) + ")\n";
    }
    if (report.score_metrics) {
        out += "\n| Metric | Value |\n|---|---|\n";
        out += "| MSE | " + fixed4(report.score_metrics->mse) + " |\n";
        out += "| MAE | " + fixed4(report.score_metrics->mae) + " |\n";
        out += "| n scored | " + std::to_string(report.score_metrics->n_scored) + " |\n";
    }
    return out;
}

void emit_report(const EvalReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
    std::string content;
    switch (format) {
    case ReportFormat::Json: content = report_to_json(report); break;
    case ReportFormat::Csv:  content = report_to_csv(report); break;
    case ReportFormat::Md:   content = report_to_md(report); break;
    }
    write_file(path, content);

    if (!report.run_metadata.started_at.empty() || !report.run_metadata.finished_at.empty()) {
        json sidecar;
        sidecar["started_at"] = report.run_metadata.started_at;
        sidecar["finished_at"] = report.run_metadata.finished_at;
        write_file(path.string() + ".meta.json", sidecar.dump(2));
    }
}

void emit_plotdata(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, EvalReport>>& reports) {
    std::string out = "component,predictor,accuracy\n";
    for (const auto& [predictor, report] : reports) {
        if (!report.has_accuracy) {
            continue;
        }
        for (Component comp : kAllComponents) {
            out += std::string(component_name(comp)) + "," + predictor + "," +
                   fixed4(report.per_component_accuracy[static_cast<std::size_t>(comp)]) + "\n";
        }
    }
    write_file(path, out);
}

} // namespace cvsskit
