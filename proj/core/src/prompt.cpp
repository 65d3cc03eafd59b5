#include "cvsskit/prompt.hpp"

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

constexpr std::string_view kDefinitions[] = {
    "Attack Vector (AV): the context by which exploitation is possible. "
    "Labels: Network (N), Adjacent (A), Local (L), Physical (P).",
    "Attack Complexity (AC): conditions beyond the attacker's control that "
    "must exist for exploitation. Labels: Low (L), High (H).",
    "Privileges Required (PR): the level of privileges an attacker must "
    "possess before exploiting the vulnerability. Labels: None (N), Low (L), High (H).",
    "User Interaction (UI): whether exploitation requires participation of a "
    "user other than the attacker. Labels: None (N), Required (R).",
    "Scope (S): whether exploitation affects resources beyond the vulnerable "
    "component's security authority. Labels: Unchanged (U), Changed (C).",
    "Confidentiality (C): impact on the confidentiality of information "
    "managed by the component. Labels: None (N), Low (L), High (H).",
    "Integrity (I): impact on the integrity of the impacted component. "
    "Labels: None (N), Low (L), High (H).",
    "Availability (A): impact on the availability of the impacted component. "
    "Labels: None (N), Low (L), High (H).",
};

const char* template_file(PromptKind kind) {
    switch (kind) {
    case PromptKind::Base:         return "base.txt";
    case PromptKind::FewShot:      return "few_shot.txt";
    case PromptKind::CweEnriched:  return "cwe_enriched.txt";
    case PromptKind::PerComponent: return "per_component.txt";
    case PromptKind::DirectScore:  return "direct_score.txt";
    }
    return "";
}

std::string all_definitions() {
    std::string out;
    for (Component comp : kAllComponents) {
        out += "- ";
        out += component_definition(comp);
        out += '\n';
    }
    return out;
}

std::string labels_with_words(Component comp) {
    // "N, A, L, P" style list of the legal letters.
    std::string out;
    for (char letter : component_labels(comp)) {
        if (!out.empty()) {
            out += ", ";
        }
        out += letter;
    }
    return out;
}

std::string fewshot_block(const FewShotSet& fewshot) {
    std::string out;
    for (const FewShotExample& example : fewshot.examples) {
        out += example.cve_id;
        out += ": ";
        out += example.description;
        out += "\nAnswer: ";
        out += example.vector_string;
        out += "\n\n";
    }
    return out;
}

std::string cwe_block(const EnrichedRecord& record) {
    if (record.cwe_texts.empty()) {
        return "No CWE information available for this CVE.\n";
    }
    std::string out;
    for (const CweEntry& entry : record.cwe_texts) {
        out += entry.id;
        out += ": ";
        out += entry.description;
        out += '\n';
        if (!entry.common_consequences.empty()) {
            out += "Common consequences: " + entry.common_consequences + '\n';
        }
        if (!entry.potential_mitigations.empty()) {
            out += "Potential mitigations: " + entry.potential_mitigations + '\n';
        }
        out += '\n';
    }
    return out;
}

std::size_t differing_components(const CvssVector& a, const CvssVector& b) {
    std::size_t n = 0;
    for (Component comp : kAllComponents) {
        if (a.label(comp) != b.label(comp)) {
            ++n;
        }
    }
    return n;
}

} // namespace

std::string_view component_definition(Component comp) {
    return kDefinitions[static_cast<std::size_t>(comp)];
}

std::optional<PromptVariant> variant_from_name(std::string_view name) {
    if (name == "base") {
        return PromptVariant::base();
    }
    if (name == "few_shot" || name == "fewshot") {
        return PromptVariant::few_shot();
    }
    if (name == "cwe" || name == "cwe_enriched") {
        return PromptVariant::cwe_enriched();
    }
    if (name == "per_component") {
        return PromptVariant::per_component(Component::AV);
    }
    if (name == "direct_score") {
        return PromptVariant::direct_score();
    }
    return std::nullopt;
}

std::string variant_name(const PromptVariant& variant) {
    switch (variant.kind) {
    case PromptKind::Base:         return "base";
    case PromptKind::FewShot:      return "few_shot";
    case PromptKind::CweEnriched:  return "cwe";
    case PromptKind::PerComponent:
        return "per_component:" + std::string(component_name(variant.component));
    case PromptKind::DirectScore:  return "direct_score";
    }
    return "unknown";
}

FewShotSet load_fewshot(const std::filesystem::path& path) {
    const json doc = json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.contains("examples") || !doc["examples"].is_array() ||
        doc["examples"].size() != 3) {
        throw ConfigError("few-shot file must hold exactly 3 examples: " + path.string());
    }

    FewShotSet set;
    std::array<CvssVector, 3> vectors;
    for (std::size_t i = 0; i < 3; ++i) {
        const json& entry = doc["examples"][i];
        set.examples[i].cve_id = entry.at("cve_id").get<std::string>();
        set.examples[i].description = entry.at("description").get<std::string>();
        set.examples[i].vector_string = entry.at("vector_string").get<std::string>();
        vectors[i] = parse_vector(set.examples[i].vector_string);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            const std::size_t differ = differing_components(vectors[i], vectors[j]);
            if (differ < 4) {
                throw ConfigError("few-shot examples " + set.examples[i].cve_id + " and " +
                                  set.examples[j].cve_id + " differ in only " +
                                  std::to_string(differ) + " components (need >= 4)");
            }
        }
    }
    return set;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& template_dir) {
    PromptTemplates out;
    out.system_preamble_ = trim(read_file(template_dir / "system.txt"));
    for (PromptKind kind : {PromptKind::Base, PromptKind::FewShot, PromptKind::CweEnriched,
                            PromptKind::PerComponent, PromptKind::DirectScore}) {
        out.templates_[kind] = read_file(template_dir / template_file(kind));
    }
    return out;
}

const std::string& PromptTemplates::raw(PromptKind kind) const {
    return templates_.at(kind);
}

std::string PromptTemplates::render(const std::string& tpl,
                                    const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const std::size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tpl, pos, tpl.size() - pos);
            break;
        }
        out.append(tpl, pos, open - pos);
        const std::size_t close = tpl.find("}}", open);
        if (close == std::string::npos) {
            throw ConfigError("unterminated placeholder in template");
        }
        const std::string name = trim(tpl.substr(open + 2, close - open - 2));
        const auto it = values.find(name);
        if (it == values.end()) {
            throw ConfigError("unknown template placeholder: " + name);
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::string build_prompt(const EnrichedRecord& record, const PromptVariant& variant,
                         const PromptTemplates& templates, const FewShotSet* fewshot) {
    if (variant.kind == PromptKind::FewShot && fewshot == nullptr) {
        throw MissingFewShot("few-shot variant requires a few-shot set");
    }

    std::map<std::string, std::string> values;
    values["description"] = record.record.description;

    switch (variant.kind) {
    case PromptKind::Base:
        values["definitions"] = all_definitions();
        break;
    case PromptKind::FewShot:
        values["definitions"] = all_definitions();
        values["examples"] = fewshot_block(*fewshot);
        break;
    case PromptKind::CweEnriched:
        values["definitions"] = all_definitions();
        values["cwe_info"] = cwe_block(record);
        break;
    case PromptKind::PerComponent:
        // Only the relevant component's definition goes into the prompt.
        values["definition"] = std::string(component_definition(variant.component));
        values["component_short"] = std::string(component_name(variant.component));
        values["component_long"] = std::string(component_long_name(variant.component));
        values["labels"] = labels_with_words(variant.component);
        break;
    case PromptKind::DirectScore:
        values["definitions"] = all_definitions();
        break;
    }

    return PromptTemplates::render(templates.raw(variant.kind), values);
}

} // namespace cvsskit
