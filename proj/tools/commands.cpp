#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "cvsskit/classifier.hpp"
#include "cvsskit/cvss.hpp"
#include "cvsskit/embed.hpp"
#include "cvsskit/errors.hpp"
#include "cvsskit/eval.hpp"
#include "cvsskit/hybrid.hpp"
#include "cvsskit/ingest.hpp"
#include "cvsskit/llm_client.hpp"
#include "cvsskit/prompt.hpp"
#include "cvsskit/sha256.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit::cli {

namespace {

using nlohmann::json;

// --- shared plumbing -----------------------------------------------------

std::string git_head(const std::filesystem::path& repo_dir) {
    const std::filesystem::path git_dir = repo_dir / ".git";
    try {
        if (!std::filesystem::exists(git_dir / "HEAD")) {
            return "unknown";
        }
        const std::string head = trim(read_file(git_dir / "HEAD"));
        if (head.rfind("ref: ", 0) == 0) {
            const std::filesystem::path ref = git_dir / head.substr(5);
            if (std::filesystem::exists(ref)) {
                return trim(read_file(ref));
            }
            return "unknown";
        }
        return head;
    } catch (const Error&) {
        return "unknown";
    }
}

Config load_config_checked(const std::filesystem::path& path) {
    if (path.empty()) {
        throw ConfigError("--config is required for this subcommand");
    }
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    return Config::load(path);
}

void require_path(const std::filesystem::path& path, const std::string& what) {
    if (path.empty()) {
        throw ConfigError(what + " is not configured");
    }
    if (!std::filesystem::exists(path)) {
        throw ConfigError(what + " not found: " + path.string());
    }
}

std::vector<CveRecord> read_cached_dataset(const Config& config) {
    const auto path = config.dataset.cache_dir / "dataset.jsonl";
    if (!std::filesystem::exists(path)) {
        throw IoError("dataset cache not found (run `cvsskit ingest` first): " + path.string());
    }
    return read_dataset(path);
}

CweCatalog catalog_for(const Config& config, bool required) {
    if (config.dataset.cwe_catalog.empty() || !std::filesystem::exists(config.dataset.cwe_catalog)) {
        if (required) {
            throw ConfigError("CWE catalog required but not found: " +
                              config.dataset.cwe_catalog.string());
        }
        return {};
    }
    return load_cwe_catalog(config.dataset.cwe_catalog);
}

std::vector<EnrichedRecord> enrich_records(const std::vector<CveRecord>& records,
                                           const Config& config, bool catalog_required) {
    const CweCatalog catalog = catalog_for(config, catalog_required);
    EnrichStats stats;
    return enrich(records, catalog, stats);
}

std::vector<CveRecord> select_records(const Config& config, const std::vector<CveRecord>& records,
                                      const std::string& set_name) {
    if (set_name == "all") {
        return records;
    }
    const DatasetSplit split =
        make_splits(records, config.dataset.split_seed, config.dataset.k_vanilla);
    if (set_name == "train") {
        return split.train;
    }
    if (set_name == "test") {
        return split.test;
    }
    if (set_name == "vanilla") {
        return split.vanilla_test;
    }
    throw ConfigError("unknown record set: " + set_name);
}

ChatParams chat_params(const Config& config) {
    ChatParams params;
    params.timeout_s = config.concurrency.timeout_s;
    params.max_retries = config.concurrency.max_retries;
    params.backoff_base_ms = config.concurrency.backoff_base_ms;
    params.api_key = config.api_key();
    return params;
}

EmbedParams embed_params(const Config& config) {
    EmbedParams params;
    params.timeout_s = config.concurrency.timeout_s;
    params.max_retries = config.concurrency.max_retries;
    params.backoff_base_ms = config.concurrency.backoff_base_ms;
    params.api_key = config.api_key();
    params.cache_dir = config.dataset.cache_dir / "embeddings";
    return params;
}

std::string dataset_manifest_hash(const Config& config) {
    const auto path = config.dataset.cache_dir / "manifest.json";
    if (!std::filesystem::exists(path)) {
        return "";
    }
    const json doc = json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) {
        return "";
    }
    return doc.value("dataset_hash", "");
}

// --- prediction file format ----------------------------------------------

json prediction_to_json(const PredictedVector& pred, const CveRecord& record,
                        const std::string& mode, const std::string& variant) {
    json components;
    for (Component comp : kAllComponents) {
        const ComponentPrediction& cp = pred.at(comp);
        json entry;
        entry["label"] = cp.label ? json(std::string(1, *cp.label)) : json(nullptr);
        entry["provenance"] = to_string(cp.provenance);
        entry["fallback"] = cp.fallback;
        entry["raw_ref"] = cp.raw_ref;
        components[std::string(component_name(comp))] = entry;
    }
    json line;
    line["cve_id"] = pred.cve_id;
    line["mode"] = mode;
    line["variant"] = variant;
    line["truth_vector"] = record.vector_string;
    line["truth_score"] = record.base_score_truth;
    line["components"] = components;
    line["vector"] = pred.assembled ? json(serialize_vector(*pred.assembled)) : json(nullptr);
    line["base_score"] = pred.base ? json(*pred.base) : json(nullptr);
    return line;
}

struct LoadedPredictions {
    std::vector<PredictedVector> preds;
    std::vector<CvssVector> truth_vectors;
    std::vector<double> truth_scores;
    std::vector<std::optional<double>> pred_scores; // direct-score files
    bool score_only = false;
    std::string mode;
    std::string variant;
};

LoadedPredictions read_predictions(const std::filesystem::path& path) {
    LoadedPredictions out;
    const std::string text = read_file(path);
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string line = text.substr(start, end - start);
        start = end + 1;
        if (trim(line).empty()) {
            continue;
        }
        const json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            throw IoError("malformed predictions line: " + line.substr(0, 80));
        }
        out.mode = doc.value("mode", out.mode);
        out.variant = doc.value("variant", out.variant);
        out.truth_scores.push_back(doc.value("truth_score", 0.0));

        if (doc.contains("predicted_score")) {
            out.score_only = true;
            out.pred_scores.push_back(doc["predicted_score"].is_null()
                                          ? std::optional<double>{}
                                          : std::optional<double>(
                                                doc["predicted_score"].get<double>()));
            continue;
        }

        out.truth_vectors.push_back(parse_vector(doc.at("truth_vector").get<std::string>()));
        PredictedVector pred;
        pred.cve_id = doc.at("cve_id").get<std::string>();
        for (Component comp : kAllComponents) {
            const json& entry = doc.at("components").at(std::string(component_name(comp)));
            ComponentPrediction& cp = pred.at(comp);
            if (!entry.at("label").is_null()) {
                cp.label = entry.at("label").get<std::string>().at(0);
            }
            cp.provenance = entry.value("provenance", "llm") == std::string("embedding")
                                ? Provenance::Embedding
                                : Provenance::Llm;
            cp.fallback = entry.value("fallback", false);
            cp.raw_ref = entry.value("raw_ref", "");
        }
        pred.finalize();
        out.preds.push_back(std::move(pred));
    }
    return out;
}

// --- subcommands ----------------------------------------------------------

int cmd_ingest(const Config& config) {
    require_path(config.dataset.repo_dir, "dataset.repo_dir");
    if (config.dataset.cache_dir.empty()) {
        throw ConfigError("dataset.cache_dir is not configured");
    }

    LoadStats stats;
    const std::vector<CveRecord> records =
        load_cve_repo(config.dataset.repo_dir, LoadFilters{}, stats);
    if (records.empty()) {
        throw IoError("no usable CVE records under " + config.dataset.repo_dir.string());
    }

    std::filesystem::create_directories(config.dataset.cache_dir);
    write_dataset(config.dataset.cache_dir / "dataset.jsonl", records);
    write_dataset(config.dataset.cache_dir / "quarantine.jsonl", stats.quarantine);

    // overlap between the embedding test split and the vanilla set, since
    // the two selections are independent
    std::size_t overlap = 0;
    if (records.size() >= 5) {
        const DatasetSplit split =
            make_splits(records, config.dataset.split_seed, config.dataset.k_vanilla);
        std::set<std::string> vanilla_ids;
        for (const CveRecord& r : split.vanilla_test) {
            vanilla_ids.insert(r.id);
        }
        for (const CveRecord& r : split.test) {
            overlap += vanilla_ids.count(r.id);
        }
    }

    json manifest;
    manifest["record_count"] = records.size();
    manifest["dataset_hash"] = dataset_hash(records);
    manifest["snapshot_commit"] = git_head(config.dataset.repo_dir);
    manifest["counting_rule"] =
        "one record per file with a CNA cvssV3_1 vector and an English description; "
        "first metric block wins";
    manifest["skipped"] = {{"no_v31", stats.skipped_no_v31},
                           {"no_description", stats.skipped_no_description},
                           {"bad_json", stats.skipped_bad_json},
                           {"bad_vector", stats.skipped_bad_vector},
                           {"bad_id", stats.skipped_bad_id},
                           {"bad_published", stats.skipped_bad_published}};
    manifest["quarantined"] = stats.quarantined;
    manifest["split_seed"] = config.dataset.split_seed;
    manifest["k_vanilla"] = config.dataset.k_vanilla;
    manifest["test_vanilla_overlap"] = overlap;
    write_file(config.dataset.cache_dir / "manifest.json", manifest.dump(2));

    std::cout << "loaded " << records.size() << " records\n"
              << "skipped: no_v31=" << stats.skipped_no_v31
              << " no_description=" << stats.skipped_no_description
              << " bad_json=" << stats.skipped_bad_json
              << " bad_vector=" << stats.skipped_bad_vector << " bad_id=" << stats.skipped_bad_id
              << " bad_published=" << stats.skipped_bad_published << "\n"
              << "quarantined " << stats.quarantined << " record(s)\n"
              << "test/vanilla overlap: " << overlap << "\n"
              << "cache written to " << config.dataset.cache_dir.string() << "\n";
    return 0;
}

int cmd_score(const std::string& vector_text) {
    const CvssVector v = parse_vector(vector_text);
    const ScoreBreakdown breakdown = base_score(v);
    std::printf("vector:         %s\n", serialize_vector(v).c_str());
    std::printf("base score:     %.1f\n", breakdown.base);
    std::printf("impact:         %.4f\n", breakdown.impact);
    std::printf("exploitability: %.4f\n", breakdown.exploitability);
    std::printf("iss:            %.4f\n", breakdown.iss);
    return 0;
}

int cmd_train(const Config& config, const std::filesystem::path& out) {
    const std::vector<CveRecord> records = read_cached_dataset(config);
    const DatasetSplit split =
        make_splits(records, config.dataset.split_seed, config.dataset.k_vanilla);

    const bool needs_cwe = config.feature_mode == FeatureMode::DescPlusCwe;
    const std::vector<EnrichedRecord> train = enrich_records(split.train, config, needs_cwe);

    HttpEmbedder embedder(config.endpoints.embed_url, config.endpoints.embed_model,
                          embed_params(config));
    const FeatureMatrix features = build_feature_matrix(train, config.feature_mode, embedder);

    std::vector<CvssVector> truths;
    truths.reserve(split.train.size());
    for (const CveRecord& record : split.train) {
        truths.push_back(record.vector);
    }

    const ModelBundle bundle = train_bundle(features, truths, config.classifier,
                                            config.endpoints.embed_model,
                                            dataset_hash(split.train));

    const std::filesystem::path bundle_path =
        out.empty() ? config.dataset.cache_dir / "bundle.json" : out;
    save_bundle(bundle_path, bundle);

    std::cout << "trained on " << split.train.size() << " records (dim "
              << features.layout.total_dim() << ")\n";
    for (Component comp : kAllComponents) {
        const ComponentClassifier& classifier = bundle.at(comp);
        std::cout << "  " << component_name(comp) << ": loss " << classifier.final_loss
                  << (classifier.degenerate ? " (degenerate)" : "") << "\n";
    }
    std::cout << "bundle written to " << bundle_path.string() << "\n";
    return 0;
}

int cmd_predict(const Config& config, const std::string& mode, const std::string& variant_name,
                const std::string& set_name, const std::filesystem::path& bundle_path,
                const std::filesystem::path& out) {
    const std::vector<CveRecord> records = read_cached_dataset(config);
    const std::string effective_set =
        !set_name.empty() ? set_name : (mode == "embedding" ? "test" : "vanilla");
    const std::vector<CveRecord> selected = select_records(config, records, effective_set);
    if (selected.empty()) {
        throw IoError("selected record set is empty");
    }

    const std::filesystem::path out_path =
        out.empty() ? config.dataset.cache_dir / ("predictions_" + mode + ".jsonl") : out;

    const auto variant = variant_from_name(variant_name);
    if (!variant) {
        throw ConfigError("unknown prompt variant: " + variant_name);
    }

    const bool wants_llm = mode == "vanilla" || mode == "hybrid";
    const bool wants_embeddings = mode == "embedding" || mode == "hybrid";
    if (!wants_llm && !wants_embeddings) {
        throw ConfigError("mode must be vanilla, embedding or hybrid, got " + mode);
    }
    if (variant->kind == PromptKind::DirectScore && mode != "vanilla") {
        throw ConfigError("direct_score variant only applies to vanilla mode");
    }

    const bool needs_cwe = (wants_embeddings && config.feature_mode == FeatureMode::DescPlusCwe) ||
                           (wants_llm && variant->kind == PromptKind::CweEnriched);
    const std::vector<EnrichedRecord> enriched = enrich_records(selected, config, needs_cwe);

    PredictOptions options;
    options.max_in_flight = config.concurrency.max_in_flight;

    // ---- LLM side ----
    std::vector<PredictedVector> llm_preds;
    std::vector<std::optional<double>> direct_scores;
    if (wants_llm) {
        require_path(config.prompts.template_dir, "prompts.template_dir");
        const PromptTemplates templates = PromptTemplates::load(config.prompts.template_dir);
        FewShotSet fewshot;
        const FewShotSet* fewshot_ptr = nullptr;
        if (variant->kind == PromptKind::FewShot) {
            require_path(config.prompts.fewshot_path, "prompts.fewshot_path");
            fewshot = load_fewshot(config.prompts.fewshot_path);
            fewshot_ptr = &fewshot;
        }
        const ChatClient client(config.endpoints.chat_url, config.endpoints.chat_model,
                                chat_params(config));
        AuditWriter audit(out_path.parent_path() / "responses.jsonl");

        if (variant->kind == PromptKind::DirectScore) {
            direct_scores = predict_direct_scores(enriched, templates, client, options, audit);
        } else {
            llm_preds =
                predict_vanilla(enriched, *variant, templates, fewshot_ptr, client, options, audit);
        }
    }

    // ---- embedding side ----
    std::vector<PredictedVector> emb_preds;
    if (wants_embeddings) {
        const std::filesystem::path resolved_bundle =
            bundle_path.empty() ? config.dataset.cache_dir / "bundle.json" : bundle_path;
        require_path(resolved_bundle, "model bundle");
        const ModelBundle bundle = load_bundle(resolved_bundle);

        HttpEmbedder embedder(config.endpoints.embed_url, config.endpoints.embed_model,
                              embed_params(config));
        const FeatureMatrix features =
            build_feature_matrix(enriched, bundle.layout.mode, embedder);
        if (features.layout != bundle.layout) {
            throw DimensionMismatch("embedded features do not match the bundle layout");
        }
        emb_preds.reserve(enriched.size());
        for (std::size_t i = 0; i < enriched.size(); ++i) {
            FeatureVector row;
            row.layout = features.layout;
            row.values.assign(features.row(i), features.row(i) + features.layout.total_dim());
            emb_preds.push_back(
                predict_vector_embeddings(bundle, row, enriched[i].record.id));
        }
    }

    // ---- assemble output ----
    std::string out_text;
    if (variant->kind == PromptKind::DirectScore) {
        for (std::size_t i = 0; i < selected.size(); ++i) {
            json line;
            line["cve_id"] = selected[i].id;
            line["mode"] = mode;
            line["variant"] = variant_name;
            line["truth_score"] = selected[i].base_score_truth;
            line["predicted_score"] =
                direct_scores[i] ? json(*direct_scores[i]) : json(nullptr);
            out_text += line.dump();
            out_text += '\n';
        }
    } else {
        for (std::size_t i = 0; i < selected.size(); ++i) {
            PredictedVector pred;
            if (mode == "vanilla") {
                pred = llm_preds[i];
            } else if (mode == "embedding") {
                pred = emb_preds[i];
            } else {
                pred = route(llm_preds[i], emb_preds[i], config.routing);
            }
            out_text += prediction_to_json(pred, selected[i], mode, variant_name).dump();
            out_text += '\n';
        }
    }
    write_file(out_path, out_text);
    std::cout << "wrote " << selected.size() << " predictions to " << out_path.string() << "\n";
    return 0;
}

std::string now_iso8601() {
    const std::time_t now = std::time(nullptr);
    char buffer[32];
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

int cmd_eval(const Config& config, const std::filesystem::path& predictions_path,
             const std::filesystem::path& out_dir, const std::vector<std::string>& formats) {
    require_path(predictions_path, "predictions file");

    RunMetadata metadata;
    metadata.started_at = now_iso8601();
    const LoadedPredictions loaded = read_predictions(predictions_path);
    metadata.predictor = loaded.mode.empty() ? "run" : loaded.mode;
    metadata.variant = loaded.variant;
    metadata.routing = routing_to_string(config.routing);
    metadata.dataset_hash = dataset_manifest_hash(config);

    EvalReport report;
    if (loaded.score_only) {
        report = evaluate_scores(loaded.pred_scores, loaded.truth_scores, metadata);
    } else {
        report = evaluate(loaded.preds, loaded.truth_vectors, loaded.truth_scores, metadata);
    }
    report.run_metadata.finished_at = now_iso8601();

    const std::filesystem::path dir = out_dir.empty() ? predictions_path.parent_path() : out_dir;
    std::filesystem::create_directories(dir);
    const std::vector<std::string>& wanted =
        formats.empty() ? config.eval.formats : formats;
    for (const std::string& format_name : wanted) {
        const ReportFormat format = report_format_from_name(format_name);
        emit_report(report, format, dir / ("report." + format_name));
    }
    emit_plotdata(dir / "plotdata.csv", {{metadata.predictor, report}});

    if (report.has_accuracy) {
        std::printf("mean accuracy: %.4f (excluding abstains: %.4f) over %zu records\n",
                    report.mean_accuracy, report.mean_accuracy_excl, report.n);
    }
    if (report.score_metrics) {
        std::printf("score regression: mse %.4f mae %.4f over %zu scored\n",
                    report.score_metrics->mse, report.score_metrics->mae,
                    report.score_metrics->n_scored);
    }
    std::cout << "reports written to " << dir.string() << "\n";
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"CVSS v3.1 vector prediction and evaluation toolkit", "cvsskit"};
    app.require_subcommand(1);

    std::filesystem::path config_path;
    std::filesystem::path out_path;
    std::filesystem::path bundle_path;
    std::filesystem::path predictions_path;
    std::string vector_text;
    std::string mode = "vanilla";
    std::string variant;
    std::string set_name;
    std::vector<std::string> formats;

    CLI::App* ingest = app.add_subcommand("ingest", "Build the dataset cache from a CVE repo");
    ingest->add_option("--config", config_path, "config file")->required();

    CLI::App* score = app.add_subcommand("score", "Score one CVSS v3.1 vector string");
    score->add_option("vector", vector_text, "canonical vector string")->required();

    CLI::App* train = app.add_subcommand("train", "Train the embedding classifiers");
    train->add_option("--config", config_path, "config file")->required();
    train->add_option("--out", out_path, "bundle output path");

    CLI::App* predict = app.add_subcommand("predict", "Predict vectors or scores");
    predict->add_option("--config", config_path, "config file")->required();
    predict->add_option("--mode", mode, "vanilla | embedding | hybrid")
        ->check(CLI::IsMember({"vanilla", "embedding", "hybrid"}));
    predict->add_option("--variant", variant,
                        "base | few_shot | cwe | per_component | direct_score");
    predict->add_option("--set", set_name, "vanilla | test | train | all");
    predict->add_option("--bundle", bundle_path, "model bundle path");
    predict->add_option("--out", out_path, "predictions output path");

    CLI::App* evaluate = app.add_subcommand("eval", "Evaluate a predictions file");
    evaluate->add_option("--config", config_path, "config file")->required();
    evaluate->add_option("--predictions", predictions_path, "predictions.jsonl")->required();
    evaluate->add_option("--out", out_path, "report output directory");
    evaluate->add_option("--format", formats, "json | csv | md (repeatable)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) {
            return cmd_ingest(load_config_checked(config_path));
        }
        if (score->parsed()) {
            return cmd_score(vector_text);
        }
        if (train->parsed()) {
            return cmd_train(load_config_checked(config_path), out_path);
        }
        if (predict->parsed()) {
            const Config config = load_config_checked(config_path);
            const std::string effective_variant =
                variant.empty() ? config.prompts.variant : variant;
            return cmd_predict(config, mode, effective_variant, set_name, bundle_path, out_path);
        }
        if (evaluate->parsed()) {
            return cmd_eval(load_config_checked(config_path), predictions_path, out_path, formats);
        }
    } catch (const MalformedVector& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace cvsskit::cli
