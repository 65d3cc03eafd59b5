#include "cvsskit/normalize.hpp"

#include <array>
#include <cctype>
#include <regex>

#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

// Spelled-out label words, shared across components; the extracted letter
// is then checked against the component's legal set.
constexpr std::pair<std::string_view, char> kWordMap[] = {
    {"network", 'N'}, {"adjacent", 'A'}, {"local", 'L'},   {"physical", 'P'},
    {"low", 'L'},     {"high", 'H'},     {"none", 'N'},    {"required", 'R'},
    {"unchanged", 'U'}, {"changed", 'C'},
};

std::optional<char> map_value_word(std::string_view word, Component comp) {
    if (word.size() == 1) {
        const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        if (component_label_valid(comp, letter)) {
            return letter;
        }
        return std::nullopt;
    }
    const std::string lower = to_lower(word);
    for (const auto& [name, letter] : kWordMap) {
        if (lower == name && component_label_valid(comp, letter)) {
            return letter;
        }
    }
    return std::nullopt;
}

const std::regex& canonical_regex() {
    static const std::regex re(
        R"(CVSS:3\.1/AV:[NALP]/AC:[LH]/PR:[NLH]/UI:[NR]/S:[UC]/C:[NLH]/I:[NLH]/A:[NLH])");
    return re;
}

std::string lenient_pattern() {
    const std::string sep = R"([\s/,;|.]*)";
    std::string pattern = R"((?:CVSS\s*:?\s*v?3\.1)?)" + sep;
    bool first = true;
    for (Component comp : kAllComponents) {
        if (!first) {
            pattern += sep;
        }
        first = false;
        pattern += R"(\b)";
        pattern += component_name(comp);
        pattern += R"(\s*[:=]\s*([)";
        pattern += component_labels(comp);
        pattern += R"(])\b)";
    }
    return pattern;
}

const std::regex& lenient_regex() {
    static const std::regex re(lenient_pattern(), std::regex::icase);
    return re;
}

// `NAME [:=] word` with the component's short and long names accepted.
const std::regex& component_pattern(Component comp) {
    static const std::array<std::regex, kComponentCount> patterns = [] {
        constexpr std::string_view kAliases[] = {
            R"(AV|Attack\s+Vector)",
            R"(AC|Attack\s+Complexity)",
            R"(PR|Privileges\s+Required)",
            R"(UI|User\s+Interaction)",
            R"(S|Scope)",
            R"(C|Confidentiality(?:\s+Impact)?)",
            R"(I|Integrity(?:\s+Impact)?)",
            R"(A|Availability(?:\s+Impact)?)",
        };
        std::array<std::regex, kComponentCount> out;
        for (std::size_t i = 0; i < kComponentCount; ++i) {
            out[i] = std::regex(R"(\b(?:)" + std::string(kAliases[i]) +
                                    R"()\b\s*[:=]\s*["'`(]*([A-Za-z]+))",
                                std::regex::icase);
        }
        return out;
    }();
    return patterns[static_cast<std::size_t>(comp)];
}

// Rule 3 for one component: first syntactic match that maps to a legal
// label wins.
std::optional<char> scan_component(std::string_view text, Component comp) {
    const std::regex& re = component_pattern(comp);
    auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), re);
    for (auto it = begin; it != std::cregex_iterator(); ++it) {
        const std::string value = (*it)[1].str();
        if (const auto letter = map_value_word(value, comp)) {
            return letter;
        }
    }
    return std::nullopt;
}

std::optional<CvssVector> match_canonical(std::string_view text) {
    std::cmatch match;
    if (std::regex_search(text.data(), text.data() + text.size(), match, canonical_regex())) {
        return parse_vector(std::string_view(match[0].first,
                                             static_cast<std::size_t>(match[0].length())));
    }
    return std::nullopt;
}

std::optional<CvssVector> match_lenient(std::string_view text) {
    std::cmatch match;
    if (!std::regex_search(text.data(), text.data() + text.size(), match, lenient_regex())) {
        return std::nullopt;
    }
    CvssVector v;
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        const char letter =
            static_cast<char>(std::toupper(static_cast<unsigned char>(*match[i + 1].first)));
        v.set_label(kAllComponents[i], letter);
    }
    return v;
}

std::optional<CvssVector> match_componentwise(std::string_view text) {
    CvssVector v;
    for (Component comp : kAllComponents) {
        const auto letter = scan_component(text, comp);
        if (!letter) {
            return std::nullopt;
        }
        v.set_label(comp, *letter);
    }
    return v;
}

// Rule 4: a line that is nothing but one label word or letter.
std::optional<char> match_bare_line(std::string_view text, Component comp) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string line = trim(text.substr(start, end - start));
        while (!line.empty() && (std::ispunct(static_cast<unsigned char>(line.back())) != 0)) {
            line.pop_back();
        }
        while (!line.empty() && (std::ispunct(static_cast<unsigned char>(line.front())) != 0)) {
            line.erase(line.begin());
        }
        if (!line.empty() && line.find_first_of(" \t") == std::string::npos) {
            if (const auto letter = map_value_word(line, comp)) {
                return letter;
            }
        }
        if (end == text.size()) {
            break;
        }
        start = end + 1;
    }
    return std::nullopt;
}

} // namespace

std::string strip_reasoning(std::string_view raw) {
    std::string out(raw);
    while (true) {
        const std::string lower = to_lower(out);
        const std::size_t open = lower.find("<think>");
        if (open == std::string::npos) {
            break;
        }
        const std::size_t close = lower.find("</think>", open + 7);
        if (close == std::string::npos) {
            out.erase(open);
        } else {
            out.erase(open, close + 8 - open);
        }
    }
    return out;
}

std::optional<CvssVector> normalize_vector_response(std::string_view text) {
    if (auto v = match_canonical(text)) {
        return v;
    }
    if (auto v = match_lenient(text)) {
        return v;
    }
    if (auto v = match_componentwise(text)) {
        return v;
    }
    return std::nullopt;
}

std::optional<char> normalize_component_response(std::string_view text, Component comp) {
    if (const auto v = match_canonical(text)) {
        return v->label(comp);
    }
    if (const auto v = match_lenient(text)) {
        return v->label(comp);
    }
    if (const auto letter = scan_component(text, comp)) {
        return letter;
    }
    if (const auto letter = match_bare_line(text, comp)) {
        return letter;
    }
    return std::nullopt;
}

std::optional<double> normalize_score_response(std::string_view text) {
    static const std::regex re(R"(\b(10(\.0+)?|[0-9](\.[0-9]+)?)\b)");
    std::cmatch match;
    if (!std::regex_search(text.data(), text.data() + text.size(), match, re)) {
        return std::nullopt;
    }
    const double value = std::stod(match[1].str());
    if (value < 0.0 || value > 10.0) {
        return std::nullopt;
    }
    return value;
}

} // namespace cvsskit
