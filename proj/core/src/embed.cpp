#include "cvsskit/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/sha256.hpp"
#include "cvsskit/util.hpp"
#include "http_retry.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

constexpr char kCacheMagic[4] = {'E', 'M', 'B', '1'};

std::string sanitize_for_path(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char ch : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ||
                        ch == '.';
        out += ok ? ch : '_';
    }
    return out.empty() ? std::string("model") : out;
}

void check_finite(const std::vector<double>& values, const std::string& context) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw BadResponseShape("non-finite embedding value from " + context);
        }
    }
}

} // namespace

HttpEmbedder::HttpEmbedder(std::string endpoint_url, std::string model, EmbedParams params)
    : endpoint_(std::move(endpoint_url)), model_(std::move(model)), params_(std::move(params)) {}

std::filesystem::path HttpEmbedder::cache_path(const std::string& text) const {
    const std::string key = sha256_hex(model_ + std::string(1, '\0') + text);
    return params_.cache_dir / sanitize_for_path(model_) / key.substr(0, 2) / (key + ".emb");
}

std::optional<std::vector<double>> HttpEmbedder::cache_load(const std::string& text) const {
    if (params_.cache_dir.empty()) {
        return std::nullopt;
    }
    std::ifstream in(cache_path(text), std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    char magic[4];
    std::uint32_t dim = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0 || dim == 0 || dim > (1u << 20)) {
        return std::nullopt; // treat a corrupt entry as a miss
    }
    std::vector<double> values(dim);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    if (!in) {
        return std::nullopt;
    }
    return values;
}

void HttpEmbedder::cache_store(const std::string& text, const std::vector<double>& values) const {
    if (params_.cache_dir.empty()) {
        return;
    }
    const std::filesystem::path path = cache_path(text);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const auto dim = static_cast<std::uint32_t>(values.size());
    out.write(kCacheMagic, 4);
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

EmbeddingMatrix HttpEmbedder::embed(const std::vector<std::string>& texts) {
    // Resolve per unique text so duplicates cost one request and cache slot.
    std::map<std::string, std::vector<double>> resolved;
    std::vector<std::string> misses;
    for (const std::string& text : texts) {
        if (resolved.count(text) != 0) {
            continue;
        }
        if (auto cached = cache_load(text)) {
            resolved[text] = std::move(*cached);
        } else {
            if (std::find(misses.begin(), misses.end(), text) == misses.end()) {
                misses.push_back(text);
            }
        }
    }

    detail::RetryParams retry;
    retry.timeout_s = params_.timeout_s;
    retry.max_retries = params_.max_retries;
    retry.backoff_base_ms = params_.backoff_base_ms;
    retry.api_key = params_.api_key;

    for (std::size_t start = 0; start < misses.size(); start += params_.batch_size) {
        const std::size_t count = std::min(params_.batch_size, misses.size() - start);
        json body;
        body["model"] = model_;
        body["input"] = json::array();
        for (std::size_t i = 0; i < count; ++i) {
            body["input"].push_back(misses[start + i]);
        }

        const detail::PostResult result =
            detail::post_json_with_retry(endpoint_, "/v1/embeddings", body.dump(), retry);
        const json doc = json::parse(result.body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() ||
            doc["data"].size() != count) {
            throw BadResponseShape("embeddings response lacks a data[] entry per input");
        }

        for (std::size_t i = 0; i < count; ++i) {
            const json& item = doc["data"][i];
            if (!item.contains("embedding") || !item["embedding"].is_array()) {
                throw BadResponseShape("embeddings response item lacks embedding[]");
            }
            // Honor the index field when present; fall back to position.
            const std::size_t slot = item.contains("index") && item["index"].is_number_unsigned()
                                         ? item["index"].get<std::size_t>()
                                         : i;
            if (slot >= count) {
                throw BadResponseShape("embeddings response index out of range");
            }
            std::vector<double> values;
            values.reserve(item["embedding"].size());
            for (const json& number : item["embedding"]) {
                if (!number.is_number()) {
                    throw BadResponseShape("embedding value is not a number (non-finite "
                                           "values serialize as null)");
                }
                values.push_back(number.get<double>());
            }
            check_finite(values, endpoint_);
            cache_store(misses[start + slot], values);
            resolved[misses[start + slot]] = std::move(values);
        }
    }

    EmbeddingMatrix matrix;
    matrix.model_name = model_;
    matrix.rows = texts.size();
    for (std::size_t r = 0; r < texts.size(); ++r) {
        const std::vector<double>& values = resolved.at(texts[r]);
        if (matrix.dim == 0) {
            matrix.dim = values.size();
            matrix.values.assign(matrix.rows * matrix.dim, 0.0);
        } else if (values.size() != matrix.dim) {
            throw DimensionMismatch("embedding dimension drift: expected " +
                                    std::to_string(matrix.dim) + ", got " +
                                    std::to_string(values.size()));
        }
        std::copy(values.begin(), values.end(), matrix.row(r));
    }
    if (texts.empty()) {
        matrix.rows = 0;
    }
    return matrix;
}

FeatureMode feature_mode_from_name(std::string_view name) {
    if (name == "desc_only" || name == "desc") {
        return FeatureMode::DescOnly;
    }
    if (name == "desc_plus_cwe" || name == "cwe") {
        return FeatureMode::DescPlusCwe;
    }
    throw ConfigError("unknown feature mode: " + std::string(name));
}

const char* feature_mode_name(FeatureMode mode) {
    return mode == FeatureMode::DescOnly ? "desc_only" : "desc_plus_cwe";
}

std::string joined_cwe_field(const EnrichedRecord& record, int field) {
    std::string out;
    for (const CweEntry& entry : record.cwe_texts) {
        const std::string* value = nullptr;
        switch (field) {
        case 0: value = &entry.description; break;
        case 1: value = &entry.common_consequences; break;
        default: value = &entry.potential_mitigations; break;
        }
        if (value->empty()) {
            continue;
        }
        if (!out.empty()) {
            out += "\n\n";
        }
        out += *value;
    }
    return out;
}

FeatureVector build_features(const EnrichedRecord& record, FeatureMode mode, Embedder& embedder) {
    std::vector<EnrichedRecord> one{record};
    const FeatureMatrix matrix = build_feature_matrix(one, mode, embedder);
    FeatureVector out;
    out.layout = matrix.layout;
    out.values.assign(matrix.values.begin(), matrix.values.end());
    return out;
}

FeatureMatrix build_feature_matrix(const std::vector<EnrichedRecord>& records, FeatureMode mode,
                                   Embedder& embedder) {
    std::vector<std::string> descriptions;
    descriptions.reserve(records.size());
    for (const EnrichedRecord& record : records) {
        descriptions.push_back(record.record.description);
    }
    const EmbeddingMatrix desc = embedder.embed(descriptions);

    FeatureMatrix out;
    out.layout.mode = mode;
    out.layout.segment_dim = desc.dim;
    out.rows = records.size();
    out.values.assign(out.rows * out.layout.total_dim(), 0.0);

    for (std::size_t r = 0; r < out.rows; ++r) {
        std::copy(desc.row(r), desc.row(r) + desc.dim, out.row(r));
    }
    if (mode == FeatureMode::DescOnly) {
        return out;
    }

    // Segments 2..4: the three CWE fields. Only non-empty texts are
    // embedded; empty ones keep their zero segment.
    for (int field = 0; field < 3; ++field) {
        std::vector<std::string> texts;
        std::vector<std::size_t> owners;
        for (std::size_t r = 0; r < records.size(); ++r) {
            std::string text = joined_cwe_field(records[r], field);
            if (!text.empty()) {
                texts.push_back(std::move(text));
                owners.push_back(r);
            }
        }
        if (texts.empty()) {
            continue;
        }
        const EmbeddingMatrix segment = embedder.embed(texts);
        if (segment.dim != out.layout.segment_dim) {
            throw DimensionMismatch("CWE segment dimension " + std::to_string(segment.dim) +
                                    " differs from description dimension " +
                                    std::to_string(out.layout.segment_dim));
        }
        const std::size_t offset = (static_cast<std::size_t>(field) + 1) * out.layout.segment_dim;
        for (std::size_t i = 0; i < owners.size(); ++i) {
            std::copy(segment.row(i), segment.row(i) + segment.dim,
                      out.row(owners[i]) + offset);
        }
    }
    return out;
}

} // namespace cvsskit
