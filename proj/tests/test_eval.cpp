#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <sstream>

#include "cvsskit/errors.hpp"
#include "cvsskit/eval.hpp"
#include "cvsskit/hybrid.hpp"
#include "cvsskit/util.hpp"
#include "support.hpp"

using namespace cvsskit;

namespace {

PredictedVector from_vector(const std::string& cve_id, const CvssVector& v) {
    PredictedVector pred;
    pred.cve_id = cve_id;
    for (Component comp : kAllComponents) {
        pred.at(comp).label = v.label(comp);
        pred.at(comp).provenance = Provenance::Llm;
    }
    pred.finalize();
    return pred;
}

} // namespace

TEST_CASE("perfect predictions score 1.0 everywhere") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H");
    const std::vector<PredictedVector> preds = {from_vector("a", truth), from_vector("b", truth)};
    const std::vector<CvssVector> truths = {truth, truth};

    const auto accuracy = component_accuracy(preds, truths, AbstainPolicy::CountAsWrong);
    for (double value : accuracy) {
        CHECK(value == 1.0);
    }
    CHECK(mean_accuracy(accuracy) == 1.0);
}

TEST_CASE("one of two AV predictions correct gives 0.5") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N");
    CvssVector wrong = truth;
    wrong.set_label(Component::AV, 'P');
    const std::vector<PredictedVector> preds = {from_vector("a", truth), from_vector("b", wrong)};
    const std::vector<CvssVector> truths = {truth, truth};

    const auto accuracy = component_accuracy(preds, truths, AbstainPolicy::CountAsWrong);
    CHECK(accuracy[static_cast<std::size_t>(Component::AV)] == 0.5);
    CHECK(accuracy[static_cast<std::size_t>(Component::AC)] == 1.0);
}

TEST_CASE("abstains count as wrong by default and leave the denominator when excluded") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N");
    std::vector<PredictedVector> preds;
    std::vector<CvssVector> truths;
    for (int i = 0; i < 4; ++i) {
        preds.push_back(from_vector("cve" + std::to_string(i), truth));
        truths.push_back(truth);
    }
    preds[1].at(Component::AV).label.reset();
    // one abstain among 4 otherwise-correct AV predictions
    const auto wrong_policy = component_accuracy(preds, truths, AbstainPolicy::CountAsWrong);
    CHECK(wrong_policy[0] == 0.75);
    const auto excl_policy = component_accuracy(preds, truths, AbstainPolicy::Exclude);
    CHECK(excl_policy[0] == 1.0);
}

TEST_CASE("mean accuracy over the reference best-per-component values lands at 0.84") {
    // strongest LLM values for AV/AC/UI, strongest embedding-classifier values elsewhere
    std::map<std::string, double> per_component = {
        {"AV", 0.95}, {"AC", 0.92}, {"UI", 0.95}, {"PR", 0.73},
        {"S", 0.86},  {"C", 0.77},  {"I", 0.77},  {"A", 0.77},
    };
    const double mean = mean_accuracy(per_component);
    CHECK(std::abs(mean - 0.84) <= 0.01);
    // consistent with the reference hybrid mean (0.835) at the same tolerance
    CHECK(std::abs(mean - 0.835) <= 0.01);
}

TEST_CASE("uniform component map means itself and missing components are an error") {
    std::array<double, kComponentCount> uniform{};
    uniform.fill(0.8);
    CHECK(mean_accuracy(uniform) == doctest::Approx(0.8).epsilon(1e-15));

    std::array<double, kComponentCount> half{};
    for (std::size_t i = 0; i < 4; ++i) {
        half[i] = 1.0;
    }
    CHECK(mean_accuracy(half) == 0.5);

    std::map<std::string, double> incomplete = {{"AV", 1.0}};
    CHECK_THROWS_AS(mean_accuracy(incomplete), MissingComponent);
}

TEST_CASE("regression metrics reproduce hand-computed values") {
    CHECK_THROWS_AS(regression_metrics({}, {}), NothingScoreable);

    const std::vector<std::optional<double>> preds = {5.0, 7.0};
    const std::vector<double> truths = {6.0, 6.0};
    const ScoreMetrics metrics = regression_metrics(preds, truths);
    CHECK(metrics.mse == 1.0);
    CHECK(metrics.mae == 1.0);
    CHECK(metrics.n_scored == 2);

    // unscorable entries drop out of the mean
    const std::vector<std::optional<double>> sparse = {5.0, std::nullopt, 7.0};
    const std::vector<double> truths3 = {6.0, 9.9, 6.0};
    const ScoreMetrics sparse_metrics = regression_metrics(sparse, truths3);
    CHECK(sparse_metrics.n_scored == 2);
    CHECK(sparse_metrics.mse == 1.0);

    const std::vector<std::optional<double>> exact = {1.5, 3.5};
    const std::vector<double> same = {1.5, 3.5};
    const ScoreMetrics zero = regression_metrics(exact, same);
    CHECK(zero.mse == 0.0);
    CHECK(zero.mae == 0.0);
}

TEST_CASE("mae squared never exceeds mse over random fixtures") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> score(0.0, 10.0);
    for (int repeat = 0; repeat < 1000; ++repeat) {
        std::vector<std::optional<double>> preds;
        std::vector<double> truths;
        const std::size_t n = 1 + rng() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            preds.emplace_back(score(rng));
            truths.push_back(score(rng));
        }
        const ScoreMetrics metrics = regression_metrics(preds, truths);
        CHECK(metrics.mae * metrics.mae <= metrics.mse + 1e-12);
    }
}

TEST_CASE("mse equals mae squared exactly when all absolute errors are equal") {
    const std::vector<std::optional<double>> preds = {3.0, 7.0, 5.0};
    const std::vector<double> truths = {4.0, 6.0, 4.0}; // |err| = 1 everywhere
    const ScoreMetrics metrics = regression_metrics(preds, truths);
    CHECK(metrics.mse == doctest::Approx(metrics.mae * metrics.mae).epsilon(1e-15));
}

TEST_CASE("length mismatches are rejected") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N");
    const std::vector<PredictedVector> preds = {from_vector("a", truth)};
    CHECK_THROWS_AS(component_accuracy(preds, {}, AbstainPolicy::CountAsWrong), LengthMismatch);
    CHECK_THROWS_AS(regression_metrics({1.0}, {}), LengthMismatch);
}

TEST_CASE("accuracy is invariant under simultaneous permutation") {
    std::vector<PredictedVector> preds;
    std::vector<CvssVector> truths;
    std::mt19937_64 rng(7);
    const auto all = enumerate_all_vectors();
    for (int i = 0; i < 12; ++i) {
        const CvssVector truth = all[rng() % all.size()];
        const CvssVector guess = all[rng() % all.size()];
        truths.push_back(truth);
        preds.push_back(from_vector("cve" + std::to_string(i), guess));
    }
    const auto base = component_accuracy(preds, truths, AbstainPolicy::CountAsWrong);

    std::vector<PredictedVector> preds_rev(preds.rbegin(), preds.rend());
    std::vector<CvssVector> truths_rev(truths.rbegin(), truths.rend());
    const auto permuted = component_accuracy(preds_rev, truths_rev, AbstainPolicy::CountAsWrong);
    CHECK(base == permuted);
}

TEST_CASE("hybrid mean accuracy equals the mean of the routed sources' accuracies") {
    // fixture with no abstains: routing then evaluating must equal the
    // source-wise piecewise accuracies.
    std::vector<PredictedVector> llm_preds, emb_preds;
    std::vector<CvssVector> truths;
    const auto all = enumerate_all_vectors();
    std::mt19937_64 rng(21);
    for (int i = 0; i < 16; ++i) {
        const CvssVector truth = all[rng() % all.size()];
        truths.push_back(truth);
        llm_preds.push_back(from_vector("cve" + std::to_string(i), all[rng() % all.size()]));
        emb_preds.push_back(from_vector("cve" + std::to_string(i), all[rng() % all.size()]));
    }
    const RoutingMap map = RoutingMap::default_map();
    std::vector<PredictedVector> routed;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        routed.push_back(route(llm_preds[i], emb_preds[i], map));
    }

    const auto llm_acc = component_accuracy(llm_preds, truths, AbstainPolicy::CountAsWrong);
    const auto emb_acc = component_accuracy(emb_preds, truths, AbstainPolicy::CountAsWrong);
    const auto hybrid_acc = component_accuracy(routed, truths, AbstainPolicy::CountAsWrong);

    std::array<double, kComponentCount> expected{};
    for (Component comp : kAllComponents) {
        const auto i = static_cast<std::size_t>(comp);
        expected[i] = map.at(comp) == Provenance::Llm ? llm_acc[i] : emb_acc[i];
        CHECK(hybrid_acc[i] == expected[i]);
    }
    CHECK(mean_accuracy(hybrid_acc) == mean_accuracy(expected));
}

TEST_CASE("evaluate produces a consistent report and json round-trips") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H");
    CvssVector off = truth;
    off.set_label(Component::PR, 'N');
    std::vector<PredictedVector> preds = {from_vector("a", truth), from_vector("b", off)};
    preds[1].at(Component::S).label.reset();
    preds[1].finalize();
    const std::vector<CvssVector> truths = {truth, truth};
    const std::vector<double> truth_scores = {7.1, 7.1};

    RunMetadata metadata;
    metadata.predictor = "test";
    const EvalReport report = evaluate(preds, truths, truth_scores, metadata);
    CHECK(report.n == 2);
    CHECK(report.per_component_accuracy[static_cast<std::size_t>(Component::PR)] == 0.5);
    CHECK(report.per_component_accuracy[static_cast<std::size_t>(Component::S)] == 0.5);
    CHECK(report.counts[static_cast<std::size_t>(Component::S)].abstain == 1);
    CHECK(report.mean_accuracy == mean_accuracy(report.per_component_accuracy));
    REQUIRE(report.score_metrics.has_value());
    CHECK(report.score_metrics->n_scored == 1); // the abstaining row is unscorable

    const std::string json_text = report_to_json(report);
    const EvalReport reloaded = report_from_json(json_text);
    CHECK(report_to_json(reloaded) == json_text);
}

TEST_CASE("csv layout is 8 component rows plus 2 summary rows") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
    const std::vector<PredictedVector> preds = {from_vector("a", truth)};
    const EvalReport report = evaluate(preds, {truth}, {9.8}, {});

    const std::string csv = report_to_csv(report);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 11); // header + 8 + 2
    CHECK(lines[1].substr(0, 3) == "AV,");
    CHECK(lines[8].substr(0, 2) == "A,");
    CHECK(lines[9].substr(0, 5) == "mean,");
    CHECK(lines[10].substr(0, 14) == "score_mse_mae,");
}

TEST_CASE("md table columns follow the canonical component order") {
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
    const std::vector<PredictedVector> preds = {from_vector("a", truth)};
    EvalReport report = evaluate(preds, {truth}, {}, {});
    report.run_metadata.predictor = "vanilla";

    const std::string md = report_to_md(report);
    CHECK(md.find("| Predictor | AV | AC | PR | UI | S | C | I | A |") != std::string::npos);
    CHECK(md.find("| vanilla") != std::string::npos);
    CHECK(md.find("Mean accuracy: 1.0000") != std::string::npos);
}

TEST_CASE("reference-values fixture renders the md table matching the stored golden file") {
    EvalReport report;
    report.has_accuracy = true;
    report.n = 1000;
    report.run_metadata.predictor = "vanilla-llm";
    const double row[kComponentCount] = {0.95, 0.92, 0.48, 0.95, 0.82, 0.62, 0.70, 0.47};
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        report.per_component_accuracy[i] = row[i];
        report.per_component_accuracy_excl[i] = row[i];
    }
    report.mean_accuracy = mean_accuracy(report.per_component_accuracy);
    report.mean_accuracy_excl = report.mean_accuracy;

    const std::string golden = read_file(testsupport::fixture_dir() / "golden_report.md");
    CHECK(report_to_md(report) == golden);
}

TEST_CASE("report emission is byte-identical across runs and fixed metrics render verbatim") {
    testsupport::TempDir tmp;
    EvalReport report;
    report.has_accuracy = false;
    report.n = 7;
    ScoreMetrics metrics;
    metrics.mse = 2.32;
    metrics.mae = 1.06;
    metrics.n_scored = 7;
    report.score_metrics = metrics;
    report.run_metadata.predictor = "direct-llm";

    const auto path_a = tmp.path() / "a.md";
    const auto path_b = tmp.path() / "b.md";
    emit_report(report, ReportFormat::Md, path_a);
    emit_report(report, ReportFormat::Md, path_b);
    const std::string a = read_file(path_a);
    CHECK(a == read_file(path_b));
    CHECK(a.find("| MSE | 2.3200 |") != std::string::npos);
    CHECK(a.find("| MAE | 1.0600 |") != std::string::npos);
}

TEST_CASE("plotdata emits component,predictor,accuracy triples") {
    testsupport::TempDir tmp;
    const CvssVector truth = parse_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
    const std::vector<PredictedVector> preds = {from_vector("a", truth)};
    const EvalReport report = evaluate(preds, {truth}, {}, {});

    const auto path = tmp.path() / "plotdata.csv";
    emit_plotdata(path, {{"vanilla", report}, {"hybrid", report}});
    const std::string text = read_file(path);
    CHECK(text.find("component,predictor,accuracy") == 0);
    CHECK(text.find("AV,vanilla,1.0000") != std::string::npos);
    CHECK(text.find("A,hybrid,1.0000") != std::string::npos);
    // 1 header + 8 rows per predictor
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
}
