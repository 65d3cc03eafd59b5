#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvsskit/cvss.hpp"
#include "cvsskit/prediction.hpp"

namespace cvsskit {

enum class AbstainPolicy { CountAsWrong, Exclude };

struct ComponentCounts {
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t abstain = 0;
};

struct ScoreMetrics {
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_scored = 0;
};

struct RunMetadata {
    std::string predictor;
    std::string variant;
    std::string routing;
    std::string dataset_hash;
    // Timestamps live in a sidecar so report files stay byte-identical
    // across reruns on identical inputs.
    std::string started_at;
    std::string finished_at;
};

/// Per-component accuracies under both abstain policies, their means, raw
/// counts, and optional score-regression metrics.
struct EvalReport {
    bool has_accuracy = true; // false for score-only (direct scoring) runs
    std::array<double, kComponentCount> per_component_accuracy{};      // count-as-wrong
    std::array<double, kComponentCount> per_component_accuracy_excl{}; // abstains excluded
    double mean_accuracy = 0.0;
    double mean_accuracy_excl = 0.0;
    std::size_t n = 0;
    std::array<ComponentCounts, kComponentCount> counts{};
    std::optional<ScoreMetrics> score_metrics;
    RunMetadata run_metadata;
};

/// correct/total per component. Abstain counts as incorrect under
/// CountAsWrong; under Exclude abstained rows leave the denominator (an
/// all-abstain component reports accuracy 0). Throws LengthMismatch.
std::array<double, kComponentCount> component_accuracy(const std::vector<PredictedVector>& preds,
                                                       const std::vector<CvssVector>& truths,
                                                       AbstainPolicy policy);

std::array<ComponentCounts, kComponentCount> component_counts(
    const std::vector<PredictedVector>& preds, const std::vector<CvssVector>& truths);

/// Unweighted arithmetic mean over the 8 components. The map form throws
/// MissingComponent unless all 8 are present.
double mean_accuracy(const std::array<double, kComponentCount>& per_component);
double mean_accuracy(const std::map<std::string, double>& per_component);

/// MSE/MAE over the scoreable pairs; throws LengthMismatch on unaligned
/// input and NothingScoreable when no pair is scoreable.
ScoreMetrics regression_metrics(const std::vector<std::optional<double>>& pred_scores,
                                const std::vector<double>& truth_scores);

/// Full report from aligned predictions and truths.
EvalReport evaluate(const std::vector<PredictedVector>& preds,
                    const std::vector<CvssVector>& truths, const std::vector<double>& truth_scores,
                    RunMetadata metadata);

/// Score-only report (direct scoring).
EvalReport evaluate_scores(const std::vector<std::optional<double>>& pred_scores,
                           const std::vector<double>& truth_scores, RunMetadata metadata);

enum class ReportFormat { Json, Csv, Md };

ReportFormat report_format_from_name(std::string_view name);

/// json is canonical and lossless; csv emits one row per component plus
/// two summary rows; md mirrors the AV..A table layout at 4 decimals.
/// Timestamps are split into `<path>.meta.json`.
void emit_report(const EvalReport& report, ReportFormat format,
                 const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_to_csv(const EvalReport& report);
std::string report_to_md(const EvalReport& report);

/// (component, predictor, accuracy) triples for external plotting.
void emit_plotdata(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, EvalReport>>& reports);

} // namespace cvsskit
