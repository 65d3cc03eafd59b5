#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cvsskit/cvss.hpp"

namespace cvsskit {

/// Removes `<think>...</think>` spans (non-greedy, multiline, case
/// insensitive). An opening tag that is never closed removes everything
/// through the end of the text. Idempotent.
std::string strip_reasoning(std::string_view raw);

// Normalization applies an ordered rule hierarchy, first match wins:
//   1. exact canonical vector substring
//   2. canonical vector with lenient separators/whitespace
//   3. per-component `NAME [:=] value` patterns, letter or full word
//   4. (component mode only) a line holding just the label word or letter
// No rule matching is Abstain, expressed as nullopt. Total and
// deterministic; inputs are expected to be reasoning-stripped already.

std::optional<CvssVector> normalize_vector_response(std::string_view text);

std::optional<char> normalize_component_response(std::string_view text, Component comp);

/// First decimal number in [0,10]; anything else is Abstain.
std::optional<double> normalize_score_response(std::string_view text);

} // namespace cvsskit
