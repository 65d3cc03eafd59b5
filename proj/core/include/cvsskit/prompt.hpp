#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "cvsskit/cvss.hpp"
#include "cvsskit/ingest.hpp"

namespace cvsskit {

enum class PromptKind { Base, FewShot, CweEnriched, PerComponent, DirectScore };

/// A prompt variant; PerComponent carries exactly one of the 8 components.
struct PromptVariant {
    PromptKind kind = PromptKind::Base;
    Component component = Component::AV; // meaningful iff kind == PerComponent

    static PromptVariant base() { return {PromptKind::Base}; }
    static PromptVariant few_shot() { return {PromptKind::FewShot}; }
    static PromptVariant cwe_enriched() { return {PromptKind::CweEnriched}; }
    static PromptVariant per_component(Component comp) {
        return {PromptKind::PerComponent, comp};
    }
    static PromptVariant direct_score() { return {PromptKind::DirectScore}; }
};

/// CLI/config spelling: base | few_shot | cwe | per_component | direct_score.
std::optional<PromptVariant> variant_from_name(std::string_view name);
std::string variant_name(const PromptVariant& variant);

struct FewShotExample {
    std::string cve_id;
    std::string description;
    std::string vector_string;
};

/// The 3 checked-in exemplars. Loading enforces that every pair of
/// exemplar vectors differs in at least 4 of the 8 components.
struct FewShotSet {
    std::array<FewShotExample, 3> examples;
};

FewShotSet load_fewshot(const std::filesystem::path& path);

/// Prompt templates read from external text files with {{placeholder}}
/// substitution. The files are the single source of truth for wording.
class PromptTemplates {
public:
    static PromptTemplates load(const std::filesystem::path& template_dir);

    const std::string& system_preamble() const { return system_preamble_; }
    const std::string& raw(PromptKind kind) const;

    /// Substitutes every {{name}}; throws ConfigError on a placeholder the
    /// caller did not provide.
    static std::string render(const std::string& tpl,
                              const std::map<std::string, std::string>& values);

private:
    std::string system_preamble_;
    std::map<PromptKind, std::string> templates_;
};

/// Normative one-line definition used inside prompts.
std::string_view component_definition(Component comp);

/// Renders the prompt for one record and variant. `fewshot` must be
/// non-null exactly when the variant is FewShot (MissingFewShot otherwise).
std::string build_prompt(const EnrichedRecord& record, const PromptVariant& variant,
                         const PromptTemplates& templates, const FewShotSet* fewshot);

} // namespace cvsskit
