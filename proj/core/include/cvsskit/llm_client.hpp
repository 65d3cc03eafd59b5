#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cvsskit/ingest.hpp"
#include "cvsskit/prediction.hpp"
#include "cvsskit/prompt.hpp"

namespace cvsskit {

struct ChatParams {
    double temperature = 0.0;
    int timeout_s = 120;
    int max_retries = 3;
    int backoff_base_ms = 1000; // doubled per retry, plus jitter
    std::string api_key;        // resolved from the environment by the caller
};

struct LlmResponse {
    std::string raw;
    std::string stripped; // raw with reasoning spans removed
    std::string model;
    std::int64_t latency_ms = 0;
    int attempt = 1;
};

/// Synchronous client for an OpenAI-compatible chat-completions endpoint.
/// Retries 429/5xx/transport failures with exponential backoff; gives up
/// with RateLimitedExhausted (HTTP) or EndpointUnreachable (transport).
/// Non-retryable statuses and unparseable bodies throw BadResponseShape.
class ChatClient {
public:
    ChatClient(std::string endpoint_url, std::string model_name, ChatParams params);

    LlmResponse complete(const std::string& prompt, const std::string& system_preamble) const;

    const std::string& model_name() const { return model_; }

private:
    std::string endpoint_;
    std::string model_;
    ChatParams params_;
};

/// One audited endpoint exchange, keyed by (cve_id, variant, component).
struct AuditEntry {
    std::string cve_id;
    std::string variant;
    std::string component; // empty for whole-vector / score queries
    LlmResponse response;
    std::string error; // non-empty when the call failed
};

using AuditSink = std::function<void(const AuditEntry&)>;

/// Thread-safe JSONL audit writer (responses.jsonl).
class AuditWriter {
public:
    explicit AuditWriter(const std::filesystem::path& path);

    void operator()(const AuditEntry& entry);

private:
    std::filesystem::path path_;
    std::shared_ptr<std::mutex> mutex_;
};

struct PredictOptions {
    int max_in_flight = 4;
};

/// Vanilla prediction: one PredictedVector per record, components tagged
/// provenance=llm, Abstains preserved. PerComponent issues 8 queries per
/// record. Per-record client errors become all-Abstain predictions and are
/// recorded through the audit sink; the batch never aborts. Output order
/// matches input order regardless of completion order.
std::vector<PredictedVector> predict_vanilla(const std::vector<EnrichedRecord>& records,
                                             const PromptVariant& variant,
                                             const PromptTemplates& templates,
                                             const FewShotSet* fewshot, const ChatClient& client,
                                             const PredictOptions& options,
                                             const AuditSink& audit = {});

/// Direct scoring: asks for the overall base score, normalizes the first
/// in-range decimal. nullopt is an Abstain.
std::vector<std::optional<double>> predict_direct_scores(
    const std::vector<EnrichedRecord>& records, const PromptTemplates& templates,
    const ChatClient& client, const PredictOptions& options, const AuditSink& audit = {});

} // namespace cvsskit
