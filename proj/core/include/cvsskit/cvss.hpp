#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cvsskit/errors.hpp"

namespace cvsskit {

// Label orders follow the canonical legend: first label is the first value
// listed for each metric (AV: N,A,L,P; AC: L,H; PR: N,L,H; UI: N,R;
// S: U,C; C/I/A: N,L,H).

enum class AttackVector : std::uint8_t { Network, Adjacent, Local, Physical };
enum class AttackComplexity : std::uint8_t { Low, High };
enum class PrivilegesRequired : std::uint8_t { None, Low, High };
enum class UserInteraction : std::uint8_t { None, Required };
enum class Scope : std::uint8_t { Unchanged, Changed };
enum class ImpactValue : std::uint8_t { None, Low, High };

/// The 8 base metrics, in canonical vector order.
enum class Component : std::uint8_t { AV, AC, PR, UI, S, C, I, A };

inline constexpr std::size_t kComponentCount = 8;

inline constexpr std::array<Component, kComponentCount> kAllComponents = {
    Component::AV, Component::AC, Component::PR, Component::UI,
    Component::S,  Component::C,  Component::I,  Component::A,
};

/// Short metric name as it appears in the vector string ("AV", "AC", ...).
std::string_view component_name(Component comp);

/// Spelled-out metric name ("Attack Vector", "Attack Complexity", ...).
std::string_view component_long_name(Component comp);

/// Ordered legal label letters for one component, e.g. "NALP" for AV.
std::string_view component_labels(Component comp);

bool component_label_valid(Component comp, char label);

/// Parses "AV", "AC", ... Returns true and sets `out` on success.
bool component_from_name(std::string_view name, Component& out);

/// One CVSS v3.1 base vector. Value type; equality is field-wise.
struct CvssVector {
    AttackVector av = AttackVector::Network;
    AttackComplexity ac = AttackComplexity::Low;
    PrivilegesRequired pr = PrivilegesRequired::None;
    UserInteraction ui = UserInteraction::None;
    Scope s = Scope::Unchanged;
    ImpactValue c = ImpactValue::None;
    ImpactValue i = ImpactValue::None;
    ImpactValue a = ImpactValue::None;

    /// Label letter of one component ('N', 'A', 'L', ...).
    char label(Component comp) const;

    /// Sets one component from its label letter; throws MalformedVector
    /// with UnknownLabel if the letter is not legal for the component.
    void set_label(Component comp, char letter);

    bool operator==(const CvssVector&) const = default;
};

/// Subscores of one vector. `base` always carries exactly one decimal digit.
struct ScoreBreakdown {
    double iss = 0.0;
    double impact = 0.0;
    double exploitability = 0.0;
    double base = 0.0;

    /// Base score as an exact integer count of tenths (71 for 7.1).
    int base_tenths() const;

    bool operator==(const ScoreBreakdown&) const = default;
};

/// Strict parser for the canonical grammar
/// `CVSS:3.1/AV:x/AC:x/PR:x/UI:x/S:x/C:x/I:x/A:x` (fixed metric order).
/// Throws MalformedVector on any deviation. Lenient forms are handled by
/// the response normalizer, not here.
CvssVector parse_vector(std::string_view text);

/// Canonical fixed-order serialization, prefix "CVSS:3.1/".
std::string serialize_vector(const CvssVector& v);

/// Smallest one-decimal value >= x, computed by integer scaling so results
/// agree bit-for-bit with the reference calculator.
double roundup(double x);

/// Base-score equations over the immutable weight table.
ScoreBreakdown base_score(const CvssVector& v);

/// Number of legal base vectors: 4*2*3*2*2*3*3*3.
inline constexpr std::size_t kVectorSpaceSize = 2592;

/// All legal vectors exactly once, in lexicographic canonical order
/// (first component varies slowest, A varies fastest).
std::vector<CvssVector> enumerate_all_vectors();

} // namespace cvsskit
