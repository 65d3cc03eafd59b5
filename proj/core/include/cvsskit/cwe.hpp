#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace cvsskit {

/// One weakness from the MITRE CWE catalog, reduced to the three fields
/// used for enrichment.
struct CweEntry {
    std::string id; // "CWE-N"
    std::string description;
    std::string common_consequences;
    std::string potential_mitigations;

    bool operator==(const CweEntry&) const = default;
};

using CweCatalog = std::map<std::string, CweEntry>;

/// Loads a CWE List export, CSV or XML detected by content. Absent fields
/// become empty strings. Throws IoError / CatalogParseError.
CweCatalog load_cwe_catalog(const std::filesystem::path& file);

CweCatalog parse_cwe_csv(const std::string& text);
CweCatalog parse_cwe_xml(const std::string& text);

} // namespace cvsskit
