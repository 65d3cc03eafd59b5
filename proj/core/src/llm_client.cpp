#include "cvsskit/llm_client.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "cvsskit/normalize.hpp"
#include "cvsskit/util.hpp"
#include "http_retry.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

std::string audit_key(const std::string& cve_id, const std::string& variant,
                      const std::string& component) {
    return cve_id + "|" + variant + "|" + (component.empty() ? "*" : component);
}

// Runs fn(i) for i in [0, n) on up to max_in_flight threads. Each index is
// claimed exactly once; results land by index, so output order never
// depends on scheduling.
void for_each_bounded(std::size_t n, int max_in_flight, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(max_in_flight, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                fn(i);
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }
}

} // namespace

ChatClient::ChatClient(std::string endpoint_url, std::string model_name, ChatParams params)
    : endpoint_(std::move(endpoint_url)), model_(std::move(model_name)), params_(std::move(params)) {}

LlmResponse ChatClient::complete(const std::string& prompt,
                                 const std::string& system_preamble) const {
    json body;
    body["model"] = model_;
    body["temperature"] = params_.temperature;
    body["messages"] = json::array();
    if (!system_preamble.empty()) {
        body["messages"].push_back({{"role", "system"}, {"content", system_preamble}});
    }
    body["messages"].push_back({{"role", "user"}, {"content", prompt}});

    detail::RetryParams retry;
    retry.timeout_s = params_.timeout_s;
    retry.max_retries = params_.max_retries;
    retry.backoff_base_ms = params_.backoff_base_ms;
    retry.api_key = params_.api_key;

    const auto start = std::chrono::steady_clock::now();
    const detail::PostResult result =
        detail::post_json_with_retry(endpoint_, "/v1/chat/completions", body.dump(), retry);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    const json doc = json::parse(result.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty() || !doc["choices"][0].contains("message") ||
        !doc["choices"][0]["message"].contains("content")) {
        throw BadResponseShape("chat response lacks choices[0].message.content");
    }

    LlmResponse response;
    response.raw = doc["choices"][0]["message"]["content"].get<std::string>();
    response.stripped = strip_reasoning(response.raw);
    response.model = doc.value("model", model_);
    response.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    response.attempt = result.attempt;
    return response;
}

AuditWriter::AuditWriter(const std::filesystem::path& path)
    : path_(path), mutex_(std::make_shared<std::mutex>()) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    // truncate at open so a rerun starts a fresh trail
    write_file(path_, "");
}

void AuditWriter::operator()(const AuditEntry& entry) {
    json line;
    line["cve_id"] = entry.cve_id;
    line["variant"] = entry.variant;
    line["component"] = entry.component;
    line["raw"] = entry.response.raw;
    line["stripped"] = entry.response.stripped;
    line["model"] = entry.response.model;
    line["latency_ms"] = entry.response.latency_ms;
    line["attempt"] = entry.response.attempt;
    line["error"] = entry.error;

    std::lock_guard<std::mutex> lock(*mutex_);
    std::ofstream out(path_, std::ios::app);
    out << line.dump() << '\n';
}

std::vector<PredictedVector> predict_vanilla(const std::vector<EnrichedRecord>& records,
                                             const PromptVariant& variant,
                                             const PromptTemplates& templates,
                                             const FewShotSet* fewshot, const ChatClient& client,
                                             const PredictOptions& options,
                                             const AuditSink& audit) {
    if (variant.kind == PromptKind::DirectScore) {
        throw ConfigError("direct_score variant predicts scores, not vectors");
    }
    if (variant.kind == PromptKind::FewShot && fewshot == nullptr) {
        throw MissingFewShot("few-shot variant requires a few-shot set");
    }

    std::vector<PredictedVector> out(records.size());
    std::mutex audit_mutex;
    const auto emit_audit = [&](const AuditEntry& entry) {
        if (audit) {
            std::lock_guard<std::mutex> lock(audit_mutex);
            audit(entry);
        }
    };

    const auto predict_one = [&](std::size_t index) {
        const EnrichedRecord& record = records[index];
        PredictedVector pred;
        pred.cve_id = record.record.id;
        for (ComponentPrediction& comp : pred.components) {
            comp.provenance = Provenance::Llm;
        }

        if (variant.kind == PromptKind::PerComponent) {
            // Eight queries, one per component.
            for (Component comp : kAllComponents) {
                const PromptVariant single = PromptVariant::per_component(comp);
                const std::string key = audit_key(record.record.id, variant_name(single),
                                                  std::string(component_name(comp)));
                pred.at(comp).raw_ref = key;
                try {
                    const std::string prompt =
                        build_prompt(record, single, templates, nullptr);
                    const LlmResponse response =
                        client.complete(prompt, templates.system_preamble());
                    pred.at(comp).label =
                        normalize_component_response(response.stripped, comp);
                    emit_audit({record.record.id, variant_name(single),
                                std::string(component_name(comp)), response, ""});
                } catch (const std::exception& err) {
                    emit_audit({record.record.id, variant_name(single),
                                std::string(component_name(comp)), {}, err.what()});
                }
            }
        } else {
            const std::string key = audit_key(record.record.id, variant_name(variant), "");
            for (ComponentPrediction& comp : pred.components) {
                comp.raw_ref = key;
            }
            try {
                const std::string prompt = build_prompt(record, variant, templates, fewshot);
                const LlmResponse response = client.complete(prompt, templates.system_preamble());
                if (const auto vector = normalize_vector_response(response.stripped)) {
                    for (Component comp : kAllComponents) {
                        pred.at(comp).label = vector->label(comp);
                    }
                }
                emit_audit({record.record.id, variant_name(variant), "", response, ""});
            } catch (const std::exception& err) {
                emit_audit({record.record.id, variant_name(variant), "", {}, err.what()});
            }
        }

        pred.finalize();
        out[index] = std::move(pred);
    };

    for_each_bounded(records.size(), options.max_in_flight, predict_one);
    return out;
}

std::vector<std::optional<double>> predict_direct_scores(
    const std::vector<EnrichedRecord>& records, const PromptTemplates& templates,
    const ChatClient& client, const PredictOptions& options, const AuditSink& audit) {
    std::vector<std::optional<double>> out(records.size());
    std::mutex audit_mutex;
    const auto emit_audit = [&](const AuditEntry& entry) {
        if (audit) {
            std::lock_guard<std::mutex> lock(audit_mutex);
            audit(entry);
        }
    };

    const PromptVariant variant = PromptVariant::direct_score();
    const auto predict_one = [&](std::size_t index) {
        const EnrichedRecord& record = records[index];
        try {
            const std::string prompt = build_prompt(record, variant, templates, nullptr);
            const LlmResponse response = client.complete(prompt, templates.system_preamble());
            out[index] = normalize_score_response(response.stripped);
            emit_audit({record.record.id, variant_name(variant), "", response, ""});
        } catch (const std::exception& err) {
            out[index] = std::nullopt;
            emit_audit({record.record.id, variant_name(variant), "", {}, err.what()});
        }
    };

    for_each_bounded(records.size(), options.max_in_flight, predict_one);
    return out;
}

} // namespace cvsskit
