#include "cvsskit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/sha256.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

bool valid_cve_id(std::string_view id) {
    // CVE-YYYY-NNNN+ (sequence part at least 4 digits)
    if (id.size() < 13 || id.substr(0, 4) != "CVE-" || id[8] != '-') {
        return false;
    }
    for (std::size_t i = 4; i < 8; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) {
            return false;
        }
    }
    for (std::size_t i = 9; i < id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) {
            return false;
        }
    }
    return true;
}

std::string english_description(const json& cna) {
    const auto it = cna.find("descriptions");
    if (it == cna.end() || !it->is_array()) {
        return "";
    }
    for (const auto& entry : *it) {
        const std::string lang = entry.value("lang", "");
        if ((lang == "en" || lang.rfind("en-", 0) == 0 || lang.rfind("en_", 0) == 0) &&
            entry.contains("value")) {
            return trim(entry["value"].get<std::string>());
        }
    }
    return "";
}

std::vector<std::string> collect_cwe_ids(const json& cna) {
    std::vector<std::string> ids;
    const auto it = cna.find("problemTypes");
    if (it == cna.end() || !it->is_array()) {
        return ids;
    }
    std::set<std::string> seen;
    for (const auto& problem : *it) {
        const auto descriptions = problem.find("descriptions");
        if (descriptions == problem.end() || !descriptions->is_array()) {
            continue;
        }
        for (const auto& desc : *descriptions) {
            const std::string cwe = trim(desc.value("cweId", ""));
            if (!cwe.empty() && cwe.rfind("CWE-", 0) == 0 && seen.insert(cwe).second) {
                ids.push_back(cwe);
            }
        }
    }
    return ids;
}

} // namespace

bool parse_cve_json(const std::string& text, CveRecord& out, std::string& reason) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        reason = "bad_json";
        return false;
    }

    const json& metadata = doc.value("cveMetadata", json::object());
    out.id = metadata.value("cveId", "");
    if (!valid_cve_id(out.id)) {
        reason = "bad_id";
        return false;
    }

    if (!doc.contains("containers") || !doc["containers"].contains("cna")) {
        reason = "bad_json";
        return false;
    }
    const json& cna = doc["containers"]["cna"];

    // First CNA-container v3.1 metric block wins when several exist.
    const json* cvss31 = nullptr;
    if (cna.contains("metrics") && cna["metrics"].is_array()) {
        for (const auto& metric : cna["metrics"]) {
            if (metric.contains("cvssV3_1") && metric["cvssV3_1"].contains("vectorString")) {
                cvss31 = &metric["cvssV3_1"];
                break;
            }
        }
    }
    if (cvss31 == nullptr) {
        reason = "no_v31";
        return false;
    }

    out.description = english_description(cna);
    if (out.description.empty()) {
        reason = "no_description";
        return false;
    }

    out.vector_string = trim((*cvss31)["vectorString"].get<std::string>());
    try {
        out.vector = parse_vector(out.vector_string);
    } catch (const MalformedVector&) {
        reason = "bad_vector";
        return false;
    }
    out.vector_string = serialize_vector(out.vector);

    out.published = trim(metadata.value("datePublished", ""));
    if (out.published.empty() && cna.contains("datePublic")) {
        out.published = trim(cna.value("datePublic", ""));
    }
    const auto epoch = parse_iso8601(out.published);
    if (!epoch) {
        reason = "bad_published";
        return false;
    }
    out.published_epoch = *epoch;

    out.cwe_ids = collect_cwe_ids(cna);

    const double recomputed = base_score(out.vector).base;
    if (cvss31->contains("baseScore") && (*cvss31)["baseScore"].is_number()) {
        out.base_score_truth = (*cvss31)["baseScore"].get<double>();
        if (std::abs(out.base_score_truth - recomputed) > 0.05) {
            reason = "score_mismatch";
            return false;
        }
    } else {
        out.base_score_truth = recomputed;
    }

    reason.clear();
    return true;
}

std::vector<CveRecord> load_cve_repo(const std::filesystem::path& root_dir,
                                     const LoadFilters& filters, LoadStats& stats) {
    namespace fs = std::filesystem;
    static_cast<void>(filters);

    fs::path base = root_dir;
    if (fs::exists(base / "cves")) {
        base = base / "cves";
    }
    if (!fs::exists(base) || !fs::is_directory(base)) {
        throw IoError("CVE repository directory not found: " + root_dir.string());
    }

    std::vector<CveRecord> records;
    for (const auto& entry : fs::recursive_directory_iterator(base)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const std::string name = entry.path().filename().string();
        if (name.rfind("CVE-", 0) != 0 || entry.path().extension() != ".json") {
            continue;
        }

        CveRecord record;
        std::string reason;
        std::string text;
        bool parsed = false;
        try {
            text = read_file(entry.path());
            parsed = parse_cve_json(text, record, reason);
        } catch (const std::exception&) {
            // structurally unexpected document; a skip reason, never fatal
            reason = "bad_json";
        }
        if (parsed) {
            ++stats.loaded;
            records.push_back(std::move(record));
            continue;
        }
        if (reason == "score_mismatch") {
            ++stats.quarantined;
            stats.quarantine.push_back(std::move(record));
        } else if (reason == "no_v31") {
            ++stats.skipped_no_v31;
        } else if (reason == "no_description") {
            ++stats.skipped_no_description;
        } else if (reason == "bad_vector") {
            ++stats.skipped_bad_vector;
        } else if (reason == "bad_id") {
            ++stats.skipped_bad_id;
        } else if (reason == "bad_published") {
            ++stats.skipped_bad_published;
        } else {
            ++stats.skipped_bad_json;
        }
    }

    std::sort(records.begin(), records.end(),
              [](const CveRecord& a, const CveRecord& b) { return a.id < b.id; });
    std::sort(stats.quarantine.begin(), stats.quarantine.end(),
              [](const CveRecord& a, const CveRecord& b) { return a.id < b.id; });
    return records;
}

std::vector<EnrichedRecord> enrich(const std::vector<CveRecord>& records,
                                   const CweCatalog& catalog, EnrichStats& stats) {
    std::vector<EnrichedRecord> out;
    out.reserve(records.size());
    for (const CveRecord& record : records) {
        EnrichedRecord enriched;
        enriched.record = record;
        for (const std::string& cwe_id : record.cwe_ids) {
            const auto it = catalog.find(cwe_id);
            if (it != catalog.end()) {
                enriched.cwe_texts.push_back(it->second);
                ++stats.resolved;
            } else {
                ++stats.missing;
            }
        }
        out.push_back(std::move(enriched));
    }
    return out;
}

DatasetSplit make_splits(const std::vector<CveRecord>& records, std::uint64_t seed,
                         std::size_t k_vanilla) {
    if (records.size() < 5) {
        throw TooFewRecords("need at least 5 records to split, have " +
                            std::to_string(records.size()));
    }

    DatasetSplit split;
    split.seed = seed;

    std::vector<std::size_t> order = index_range(records.size());
    deterministic_shuffle(order, seed);

    const auto train_size =
        static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(records.size())));
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < train_size ? split.train : split.test).push_back(records[order[i]]);
    }

    std::vector<std::size_t> by_recency = index_range(records.size());
    std::sort(by_recency.begin(), by_recency.end(), [&records](std::size_t a, std::size_t b) {
        if (records[a].published_epoch != records[b].published_epoch) {
            return records[a].published_epoch > records[b].published_epoch;
        }
        return records[a].id < records[b].id;
    });
    const std::size_t k = std::min(k_vanilla, records.size());
    split.vanilla_test.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        split.vanilla_test.push_back(records[by_recency[i]]);
    }
    return split;
}

std::string record_to_jsonl(const CveRecord& record) {
    json line;
    line["id"] = record.id;
    line["description"] = record.description;
    line["published"] = record.published;
    line["vector_string"] = record.vector_string;
    line["base_score"] = record.base_score_truth;
    line["cwe_ids"] = record.cwe_ids;
    return line.dump();
}

CveRecord record_from_jsonl(const std::string& line) {
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw IoError("malformed dataset line: " + line.substr(0, 80));
    }
    CveRecord record;
    record.id = doc.at("id").get<std::string>();
    record.description = doc.at("description").get<std::string>();
    record.published = doc.at("published").get<std::string>();
    record.vector_string = doc.at("vector_string").get<std::string>();
    record.base_score_truth = doc.at("base_score").get<double>();
    record.cwe_ids = doc.value("cwe_ids", std::vector<std::string>{});
    record.vector = parse_vector(record.vector_string);
    const auto epoch = parse_iso8601(record.published);
    record.published_epoch = epoch.value_or(0);
    return record;
}

void write_dataset(const std::filesystem::path& path, const std::vector<CveRecord>& records) {
    std::string out;
    for (const CveRecord& record : records) {
        out += record_to_jsonl(record);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<CveRecord> read_dataset(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<CveRecord> records;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string line = text.substr(start, end - start);
        if (!trim(line).empty()) {
            records.push_back(record_from_jsonl(line));
        }
        start = end + 1;
    }
    return records;
}

std::string dataset_hash(const std::vector<CveRecord>& records) {
    Sha256 hasher;
    for (const CveRecord& record : records) {
        hasher.update(record_to_jsonl(record));
        hasher.update("\n");
    }
    return hasher.hex_digest();
}

} // namespace cvsskit
