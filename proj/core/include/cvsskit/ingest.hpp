#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cvsskit/cvss.hpp"
#include "cvsskit/cwe.hpp"

namespace cvsskit {

/// One CVE with description, ground-truth vector and optional CWE ids.
struct CveRecord {
    std::string id;              // "CVE-YYYY-NNNN+"
    std::string description;     // English description entry
    std::string published;       // original ISO-8601 timestamp
    std::int64_t published_epoch = 0;
    std::string vector_string;   // canonical CVSS v3.1 form
    CvssVector vector;
    double base_score_truth = 0.0;
    std::vector<std::string> cwe_ids;

    bool operator==(const CveRecord&) const = default;
};

/// A CveRecord paired with its resolved CWE catalog entries.
struct EnrichedRecord {
    CveRecord record;
    std::vector<CweEntry> cwe_texts;
};

struct LoadFilters {
    // A CveRecord always needs a ground-truth vector, so files without a
    // v3.1 metric are skipped either way; the flag is kept for the call
    // signature and counted under skipped_no_v31.
    bool require_v31 = true;
};

/// Per-reason skip counters plus the quarantine set. A record whose source
/// carries a numeric score more than 0.05 away from the recomputed base
/// score is quarantined: excluded from the result but kept auditable.
struct LoadStats {
    std::size_t loaded = 0;
    std::size_t skipped_no_v31 = 0;
    std::size_t skipped_no_description = 0;
    std::size_t skipped_bad_json = 0;
    std::size_t skipped_bad_vector = 0;
    std::size_t skipped_bad_id = 0;
    std::size_t skipped_bad_published = 0;
    std::size_t quarantined = 0;
    std::vector<CveRecord> quarantine;

    std::size_t total_seen() const {
        return loaded + skipped_no_v31 + skipped_no_description + skipped_bad_json +
               skipped_bad_vector + skipped_bad_id + skipped_bad_published + quarantined;
    }
};

/// Walks a cvelistV5-layout tree (cves/<year>/<prefix>/CVE-*.json) and
/// returns records sorted by id. Unreadable tree throws IoError; malformed
/// individual files are skip reasons, never fatal.
std::vector<CveRecord> load_cve_repo(const std::filesystem::path& root_dir,
                                     const LoadFilters& filters, LoadStats& stats);

/// Parses one cvelistV5 JSON document. Returns false with `reason` set when
/// the record must be skipped; quarantine is signalled via reason
/// "score_mismatch" with the parsed record still written to `out`.
bool parse_cve_json(const std::string& text, CveRecord& out, std::string& reason);

struct EnrichStats {
    std::size_t resolved = 0;
    std::size_t missing = 0;
};

/// Pairs each record with the catalog entries for its CWE ids. Unresolved
/// ids are dropped and counted.
std::vector<EnrichedRecord> enrich(const std::vector<CveRecord>& records,
                                   const CweCatalog& catalog, EnrichStats& stats);

struct DatasetSplit {
    std::vector<CveRecord> train;
    std::vector<CveRecord> test;
    std::vector<CveRecord> vanilla_test; // most recent k, may overlap train
    std::uint64_t seed = 0;
};

/// Seeded shuffle then 80/20 partition; vanilla_test is the k most recent
/// records by published timestamp, ties broken by ascending id. Throws
/// TooFewRecords below 5 records.
DatasetSplit make_splits(const std::vector<CveRecord>& records, std::uint64_t seed,
                         std::size_t k_vanilla);

// Line-delimited JSON dataset cache; downstream stages run corpus-free.
std::string record_to_jsonl(const CveRecord& record);
CveRecord record_from_jsonl(const std::string& line);
void write_dataset(const std::filesystem::path& path, const std::vector<CveRecord>& records);
std::vector<CveRecord> read_dataset(const std::filesystem::path& path);

/// Content hash of a dataset in id order; stored in manifests.
std::string dataset_hash(const std::vector<CveRecord>& records);

} // namespace cvsskit
