#include "cvsskit/cwe.hpp"

#include <cctype>
#include <vector>

#include "cvsskit/errors.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

// Minimal entity set; the catalog exports use no others outside CDATA.
std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '&') {
            const std::string_view rest = text.substr(i);
            if (rest.starts_with("&amp;")) { out += '&'; i += 5; continue; }
            if (rest.starts_with("&lt;")) { out += '<'; i += 4; continue; }
            if (rest.starts_with("&gt;")) { out += '>'; i += 4; continue; }
            if (rest.starts_with("&quot;")) { out += '"'; i += 6; continue; }
            if (rest.starts_with("&apos;")) { out += '\''; i += 6; continue; }
        }
        out += text[i];
        ++i;
    }
    return out;
}

// Text content of an XML fragment: tags dropped, whitespace collapsed.
std::string flatten_xml_text(std::string_view fragment) {
    std::string out;
    out.reserve(fragment.size());
    bool in_tag = false;
    for (char ch : fragment) {
        if (ch == '<') {
            in_tag = true;
            out += ' ';
        } else if (ch == '>') {
            in_tag = false;
        } else if (!in_tag) {
            out += ch;
        }
    }
    return collapse_whitespace(decode_entities(out));
}

std::vector<std::string> split_csv_row(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
        const char ch = text[pos];
        if (quoted) {
            if (ch == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
                ++pos;
            }
            ++pos;
            fields.push_back(field);
            return fields;
        } else {
            field += ch;
        }
        ++pos;
    }
    fields.push_back(field);
    return fields;
}

std::string normalize_cwe_id(std::string_view raw) {
    std::string id = trim(raw);
    if (!id.empty() && id.find("CWE-") != 0) {
        id = "CWE-" + id;
    }
    return id;
}

} // namespace

CweCatalog parse_cwe_csv(const std::string& text) {
    CweCatalog catalog;
    if (trim(text).empty()) {
        return catalog;
    }

    std::size_t pos = 0;
    const std::vector<std::string> header = split_csv_row(text, pos);

    auto column = [&header](std::string_view name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (to_lower(trim(header[i])) == to_lower(name)) {
                return static_cast<std::ptrdiff_t>(i);
            }
        }
        return -1;
    };

    const std::ptrdiff_t id_col = column("CWE-ID");
    const std::ptrdiff_t desc_col = column("Description");
    const std::ptrdiff_t cons_col = column("Common Consequences");
    const std::ptrdiff_t miti_col = column("Potential Mitigations");
    if (id_col < 0 || desc_col < 0) {
        throw CatalogParseError("CWE CSV header lacks CWE-ID/Description columns");
    }

    auto cell = [](const std::vector<std::string>& row, std::ptrdiff_t col) -> std::string {
        if (col < 0 || static_cast<std::size_t>(col) >= row.size()) {
            return "";
        }
        return row[static_cast<std::size_t>(col)];
    };

    std::size_t row_number = 1;
    while (pos < text.size()) {
        ++row_number;
        const std::vector<std::string> row = split_csv_row(text, pos);
        if (row.size() == 1 && trim(row[0]).empty()) {
            continue;
        }
        CweEntry entry;
        entry.id = normalize_cwe_id(cell(row, id_col));
        if (entry.id == "CWE-") {
            throw CatalogParseError("CWE CSV row " + std::to_string(row_number) + ": empty CWE-ID");
        }
        entry.description = trim(cell(row, desc_col));
        entry.common_consequences = trim(cell(row, cons_col));
        entry.potential_mitigations = trim(cell(row, miti_col));
        catalog[entry.id] = std::move(entry);
    }
    return catalog;
}

CweCatalog parse_cwe_xml(const std::string& text) {
    CweCatalog catalog;

    auto tag_block = [&](std::string_view hay, std::string_view tag,
                         std::size_t from) -> std::pair<std::size_t, std::string> {
        const std::string open = "<" + std::string(tag);
        const std::string close = "</" + std::string(tag) + ">";
        const std::size_t begin = hay.find(open, from);
        if (begin == std::string_view::npos) {
            return {std::string_view::npos, ""};
        }
        const std::size_t content_start = hay.find('>', begin);
        if (content_start == std::string_view::npos) {
            throw CatalogParseError("CWE XML: unterminated <" + std::string(tag) + "> open tag");
        }
        if (hay[content_start - 1] == '/') { // self-closing
            return {content_start + 1, ""};
        }
        const std::size_t end = hay.find(close, content_start);
        if (end == std::string_view::npos) {
            throw CatalogParseError("CWE XML: missing " + close);
        }
        return {end + close.size(),
                std::string(hay.substr(content_start + 1, end - content_start - 1))};
    };

    std::size_t pos = 0;
    while (true) {
        const std::size_t weakness = text.find("<Weakness ", pos);
        if (weakness == std::string::npos) {
            break;
        }
        const std::size_t id_attr = text.find("ID=\"", weakness);
        const std::size_t tag_end = text.find('>', weakness);
        if (id_attr == std::string::npos || tag_end == std::string::npos || id_attr > tag_end) {
            throw CatalogParseError("CWE XML: <Weakness> element without ID attribute");
        }
        const std::size_t id_end = text.find('"', id_attr + 4);
        if (id_end == std::string::npos) {
            throw CatalogParseError("CWE XML: unterminated ID attribute");
        }

        auto [block_end, body] = tag_block(text, "Weakness", weakness);
        if (block_end == std::string::npos) {
            break;
        }

        CweEntry entry;
        entry.id = normalize_cwe_id(text.substr(id_attr + 4, id_end - (id_attr + 4)));
        entry.description = flatten_xml_text(tag_block(body, "Description", 0).second);
        entry.common_consequences = flatten_xml_text(tag_block(body, "Common_Consequences", 0).second);
        entry.potential_mitigations = flatten_xml_text(tag_block(body, "Potential_Mitigations", 0).second);
        catalog[entry.id] = std::move(entry);

        pos = block_end;
    }
    return catalog;
}

CweCatalog load_cwe_catalog(const std::filesystem::path& file) {
    const std::string text = read_file(file);
    std::size_t first = 0;
    while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) {
        ++first;
    }
    if (first < text.size() && text[first] == '<') {
        return parse_cwe_xml(text);
    }
    return parse_cwe_csv(text);
}

} // namespace cvsskit
