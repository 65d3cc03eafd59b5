#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvsskit/ingest.hpp"

namespace cvsskit {

/// Dense row-per-text embedding matrix. Rows align with the input texts.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> values; // row-major
    std::string model_name;

    const double* row(std::size_t r) const { return values.data() + r * dim; }
    double* row(std::size_t r) { return values.data() + r * dim; }
};

/// Anything that can turn texts into embeddings; lets tests and offline
/// paths stand in for the HTTP client.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingMatrix embed(const std::vector<std::string>& texts) = 0;
    virtual std::string model_name() const = 0;
};

struct EmbedParams {
    int timeout_s = 120;
    int max_retries = 3;
    int backoff_base_ms = 1000;
    std::size_t batch_size = 64;
    std::string api_key;
    std::filesystem::path cache_dir; // empty disables the on-disk cache
};

/// Client for an OpenAI-compatible embeddings endpoint with an on-disk
/// cache keyed by (model_name, sha256(text)). Cache hits make no HTTP
/// calls. Rejects non-finite values and dimension drift across batches.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(std::string endpoint_url, std::string model, EmbedParams params);

    EmbeddingMatrix embed(const std::vector<std::string>& texts) override;
    std::string model_name() const override { return model_; }

private:
    std::optional<std::vector<double>> cache_load(const std::string& text) const;
    void cache_store(const std::string& text, const std::vector<double>& values) const;
    std::filesystem::path cache_path(const std::string& text) const;

    std::string endpoint_;
    std::string model_;
    EmbedParams params_;
};

enum class FeatureMode { DescOnly, DescPlusCwe };

FeatureMode feature_mode_from_name(std::string_view name);
const char* feature_mode_name(FeatureMode mode);

/// Segment layout of a feature vector: one segment for the description,
/// plus the three CWE text fields in enriched mode. All segments share the
/// embedder's dimension; absent CWE text stays all-zero.
struct FeatureLayout {
    FeatureMode mode = FeatureMode::DescOnly;
    std::size_t segment_dim = 0;

    std::size_t segments() const { return mode == FeatureMode::DescOnly ? 1 : 4; }
    std::size_t total_dim() const { return segments() * segment_dim; }

    bool operator==(const FeatureLayout&) const = default;
};

struct FeatureVector {
    FeatureLayout layout;
    std::vector<double> values;
};

struct FeatureMatrix {
    FeatureLayout layout;
    std::size_t rows = 0;
    std::vector<double> values; // row-major, row stride = layout.total_dim()

    const double* row(std::size_t r) const { return values.data() + r * layout.total_dim(); }
    double* row(std::size_t r) { return values.data() + r * layout.total_dim(); }
};

/// Joins the given CWE field across a record's resolved entries with blank
/// lines; empty result means "zero segment".
std::string joined_cwe_field(const EnrichedRecord& record, int field);

FeatureVector build_features(const EnrichedRecord& record, FeatureMode mode, Embedder& embedder);

/// Batched form used by training and bulk prediction; one embed call per
/// segment column over all records.
FeatureMatrix build_feature_matrix(const std::vector<EnrichedRecord>& records, FeatureMode mode,
                                   Embedder& embedder);

} // namespace cvsskit
