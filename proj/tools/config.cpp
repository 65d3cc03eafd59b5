#include "config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit::cli {

namespace {

using nlohmann::json;

std::filesystem::path path_value(const json& doc, const char* key,
                                 const std::filesystem::path& base) {
    if (!doc.contains(key)) {
        return {};
    }
    std::filesystem::path p = doc.at(key).get<std::string>();
    if (p.is_relative() && !base.empty()) {
        p = base / p;
    }
    return p;
}

RoutingMap routing_from_json(const json& doc) {
    RoutingMap map;
    for (Component comp : kAllComponents) {
        const std::string name(component_name(comp));
        if (!doc.contains(name)) {
            throw ConfigError("routing map must name all 8 components, missing " + name);
        }
        const std::string source = doc.at(name).get<std::string>();
        if (source == "llm") {
            map.set(comp, Provenance::Llm);
        } else if (source == "embedding" || source == "embeddings") {
            map.set(comp, Provenance::Embedding);
        } else {
            throw ConfigError("routing source for " + name + " must be llm or embedding, got " +
                              source);
        }
    }
    return map;
}

} // namespace

std::string routing_to_string(const RoutingMap& map) {
    std::string out;
    for (Component comp : kAllComponents) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::string(component_name(comp)) + "=" + to_string(map.at(comp));
    }
    return out;
}

Config Config::load(const std::filesystem::path& path) {
    const json doc = json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("config is not valid JSON: " + path.string());
    }
    // relative paths resolve against the config file's directory
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

    Config config;
    if (doc.contains("endpoints")) {
        const json& e = doc["endpoints"];
        config.endpoints.chat_url = e.value("chat_url", "");
        config.endpoints.chat_model = e.value("chat_model", "");
        config.endpoints.embed_url = e.value("embed_url", "");
        config.endpoints.embed_model = e.value("embed_model", "");
        config.endpoints.api_key_env_name = e.value("api_key_env_name", "CVSSKIT_API_KEY");
    }
    if (doc.contains("dataset")) {
        const json& d = doc["dataset"];
        config.dataset.repo_dir = path_value(d, "repo_dir", base);
        config.dataset.cwe_catalog = path_value(d, "cwe_catalog", base);
        config.dataset.cache_dir = path_value(d, "cache_dir", base);
        config.dataset.k_vanilla = d.value("k_vanilla", std::size_t{1000});
        config.dataset.split_seed = d.value("split_seed", std::uint64_t{42});
    }
    if (doc.contains("prompts")) {
        const json& p = doc["prompts"];
        config.prompts.template_dir = path_value(p, "template_dir", base);
        config.prompts.fewshot_path = path_value(p, "fewshot_path", base);
        config.prompts.variant = p.value("variant", "base");
    }
    if (doc.contains("classifier")) {
        const json& c = doc["classifier"];
        config.classifier.lr = c.value("lr", 0.1);
        config.classifier.l2 = c.value("l2", 1e-4);
        config.classifier.epochs = c.value("epochs", std::size_t{200});
        config.classifier.batch = c.value("batch", std::size_t{64});
        config.classifier.seed = c.value("seed", std::uint64_t{42});
        config.classifier.class_weighting = c.value("class_weighting", false);
        if (c.contains("feature_mode")) {
            config.feature_mode = feature_mode_from_name(c.at("feature_mode").get<std::string>());
        }
    }
    if (doc.contains("routing")) {
        config.routing = routing_from_json(doc["routing"]);
    }
    if (doc.contains("eval")) {
        const json& e = doc["eval"];
        config.eval.abstain_policy = e.value("abstain_policy", "count_as_wrong");
        if (e.contains("formats")) {
            config.eval.formats = e.at("formats").get<std::vector<std::string>>();
        }
        if (config.eval.abstain_policy != "count_as_wrong" &&
            config.eval.abstain_policy != "exclude") {
            throw ConfigError("eval.abstain_policy must be count_as_wrong or exclude");
        }
    }
    if (doc.contains("concurrency")) {
        const json& c = doc["concurrency"];
        config.concurrency.max_in_flight = c.value("max_in_flight", 4);
        config.concurrency.timeout_s = c.value("timeout_s", 120);
        config.concurrency.max_retries = c.value("max_retries", 3);
        config.concurrency.backoff_base_ms = c.value("backoff_base_ms", 1000);
    }
    return config;
}

std::string Config::api_key() const {
    const char* value = std::getenv(endpoints.api_key_env_name.c_str());
    return value == nullptr ? "" : value;
}

} // namespace cvsskit::cli
