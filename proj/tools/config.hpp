#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cvsskit/classifier.hpp"
#include "cvsskit/embed.hpp"
#include "cvsskit/hybrid.hpp"

namespace cvsskit::cli {

struct EndpointsConfig {
    std::string chat_url;
    std::string chat_model;
    std::string embed_url;
    std::string embed_model;
    std::string api_key_env_name = "CVSSKIT_API_KEY";
};

struct DatasetConfig {
    std::filesystem::path repo_dir;
    std::filesystem::path cwe_catalog;
    std::filesystem::path cache_dir;
    std::size_t k_vanilla = 1000;
    std::uint64_t split_seed = 42;
};

struct PromptsConfig {
    std::filesystem::path template_dir;
    std::filesystem::path fewshot_path;
    std::string variant = "base";
};

struct EvalConfig {
    std::string abstain_policy = "count_as_wrong"; // or "exclude"
    std::vector<std::string> formats = {"json", "csv", "md"};
};

struct ConcurrencyConfig {
    int max_in_flight = 4;
    int timeout_s = 120;
    int max_retries = 3;
    int backoff_base_ms = 1000;
};

struct Config {
    EndpointsConfig endpoints;
    DatasetConfig dataset;
    PromptsConfig prompts;
    Hyperparams classifier;
    FeatureMode feature_mode = FeatureMode::DescOnly;
    RoutingMap routing = RoutingMap::default_map();
    EvalConfig eval;
    ConcurrencyConfig concurrency;

    static Config load(const std::filesystem::path& path);

    /// API key from the configured environment variable, empty if unset.
    std::string api_key() const;
};

std::string routing_to_string(const RoutingMap& map);

} // namespace cvsskit::cli
