#include "cvsskit/cvss.hpp"

#include <algorithm>
#include <cmath>

namespace cvsskit {

namespace {

// CVSS v3.1 base metric weights, §7.4 of the specification. Immutable;
// scoring is normative and never configurable.
constexpr double kAvWeight[] = {0.85, 0.62, 0.55, 0.2};      // N A L P
constexpr double kAcWeight[] = {0.77, 0.44};                 // L H
constexpr double kPrWeightUnchanged[] = {0.85, 0.62, 0.27};  // N L H
constexpr double kPrWeightChanged[] = {0.85, 0.68, 0.5};     // N L H
constexpr double kUiWeight[] = {0.85, 0.62};                 // N R
constexpr double kCiaWeight[] = {0.0, 0.22, 0.56};           // N L H

constexpr double kExploitabilityCoefficient = 8.22;
constexpr double kScopeCoefficient = 1.08;
constexpr double kImpactUnchangedCoefficient = 6.42;
constexpr double kImpactChangedCoefficient = 7.52;

constexpr std::string_view kShortNames[] = {"AV", "AC", "PR", "UI", "S", "C", "I", "A"};
constexpr std::string_view kLongNames[] = {
    "Attack Vector",    "Attack Complexity", "Privileges Required",
    "User Interaction", "Scope",             "Confidentiality",
    "Integrity",        "Availability",
};
constexpr std::string_view kLabels[] = {"NALP", "LH", "NLH", "NR", "UC", "NLH", "NLH", "NLH"};

std::size_t index_of(Component comp) {
    return static_cast<std::size_t>(comp);
}

} // namespace

std::string_view component_name(Component comp) {
    return kShortNames[index_of(comp)];
}

std::string_view component_long_name(Component comp) {
    return kLongNames[index_of(comp)];
}

std::string_view component_labels(Component comp) {
    return kLabels[index_of(comp)];
}

bool component_label_valid(Component comp, char label) {
    return component_labels(comp).find(label) != std::string_view::npos;
}

bool component_from_name(std::string_view name, Component& out) {
    for (Component comp : kAllComponents) {
        if (component_name(comp) == name) {
            out = comp;
            return true;
        }
    }
    return false;
}

char CvssVector::label(Component comp) const {
    std::size_t ordinal = 0;
    switch (comp) {
    case Component::AV: ordinal = static_cast<std::size_t>(av); break;
    case Component::AC: ordinal = static_cast<std::size_t>(ac); break;
    case Component::PR: ordinal = static_cast<std::size_t>(pr); break;
    case Component::UI: ordinal = static_cast<std::size_t>(ui); break;
    case Component::S:  ordinal = static_cast<std::size_t>(s); break;
    case Component::C:  ordinal = static_cast<std::size_t>(c); break;
    case Component::I:  ordinal = static_cast<std::size_t>(i); break;
    case Component::A:  ordinal = static_cast<std::size_t>(a); break;
    }
    return component_labels(comp)[ordinal];
}

void CvssVector::set_label(Component comp, char letter) {
    const std::string_view labels = component_labels(comp);
    const std::size_t pos = labels.find(letter);
    if (pos == std::string_view::npos) {
        throw MalformedVector(VectorErrorKind::UnknownLabel, std::string(component_name(comp)));
    }
    switch (comp) {
    case Component::AV: av = static_cast<AttackVector>(pos); break;
    case Component::AC: ac = static_cast<AttackComplexity>(pos); break;
    case Component::PR: pr = static_cast<PrivilegesRequired>(pos); break;
    case Component::UI: ui = static_cast<UserInteraction>(pos); break;
    case Component::S:  s = static_cast<Scope>(pos); break;
    case Component::C:  c = static_cast<ImpactValue>(pos); break;
    case Component::I:  i = static_cast<ImpactValue>(pos); break;
    case Component::A:  a = static_cast<ImpactValue>(pos); break;
    }
}

int ScoreBreakdown::base_tenths() const {
    return static_cast<int>(std::lround(base * 10.0));
}

CvssVector parse_vector(std::string_view text) {
    // Split on '/'. Expect exactly the prefix token plus one token per metric.
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t slash = text.find('/', start);
        if (slash == std::string_view::npos) {
            tokens.push_back(text.substr(start));
            break;
        }
        tokens.push_back(text.substr(start, slash - start));
        start = slash + 1;
    }

    if (tokens.empty() || tokens[0] != "CVSS:3.1") {
        throw MalformedVector(VectorErrorKind::BadPrefix, std::string(tokens.empty() ? "" : tokens[0]));
    }

    CvssVector v;
    for (std::size_t pos = 0; pos < kComponentCount; ++pos) {
        const Component expected = kAllComponents[pos];
        if (pos + 1 >= tokens.size()) {
            throw MalformedVector(VectorErrorKind::MissingMetric, std::string(component_name(expected)));
        }
        const std::string_view token = tokens[pos + 1];
        const std::size_t colon = token.find(':');
        const std::string_view key = token.substr(0, colon == std::string_view::npos ? token.size() : colon);
        if (key != component_name(expected)) {
            Component found;
            if (component_from_name(key, found)) {
                throw MalformedVector(VectorErrorKind::WrongOrder,
                                      std::string(key) + " where " + std::string(component_name(expected)) +
                                          " expected");
            }
            throw MalformedVector(VectorErrorKind::MissingMetric, std::string(component_name(expected)));
        }
        if (colon == std::string_view::npos || token.size() != colon + 2) {
            throw MalformedVector(VectorErrorKind::UnknownLabel, std::string(component_name(expected)));
        }
        v.set_label(expected, token[colon + 1]);
    }

    if (tokens.size() > kComponentCount + 1) {
        throw MalformedVector(VectorErrorKind::TrailingGarbage,
                              "token " + std::to_string(kComponentCount + 1) + ": '" +
                                  std::string(tokens[kComponentCount + 1]) + "'");
    }
    return v;
}

std::string serialize_vector(const CvssVector& v) {
    std::string out = "CVSS:3.1";
    out.reserve(44);
    for (Component comp : kAllComponents) {
        out += '/';
        out += component_name(comp);
        out += ':';
        out += v.label(comp);
    }
    return out;
}

double roundup(double x) {
    // Appendix-A integer scaling: round to the nearest 1e-5, then take the
    // ceiling at one decimal unless already exact.
    const long long scaled = std::llround(x * 100000.0);
    if (scaled % 10000 == 0) {
        return static_cast<double>(scaled) / 100000.0;
    }
    return static_cast<double>(scaled / 10000 + 1) / 10.0;
}

ScoreBreakdown base_score(const CvssVector& v) {
    ScoreBreakdown out;

    const double wc = kCiaWeight[static_cast<std::size_t>(v.c)];
    const double wi = kCiaWeight[static_cast<std::size_t>(v.i)];
    const double wa = kCiaWeight[static_cast<std::size_t>(v.a)];
    out.iss = 1.0 - ((1.0 - wc) * (1.0 - wi) * (1.0 - wa));

    if (v.s == Scope::Unchanged) {
        out.impact = kImpactUnchangedCoefficient * out.iss;
    } else {
        out.impact = kImpactChangedCoefficient * (out.iss - 0.029) -
                     3.25 * std::pow(out.iss - 0.02, 15.0);
    }

    const double* pr_weights = (v.s == Scope::Unchanged) ? kPrWeightUnchanged : kPrWeightChanged;
    out.exploitability = kExploitabilityCoefficient *
                         kAvWeight[static_cast<std::size_t>(v.av)] *
                         kAcWeight[static_cast<std::size_t>(v.ac)] *
                         pr_weights[static_cast<std::size_t>(v.pr)] *
                         kUiWeight[static_cast<std::size_t>(v.ui)];

    if (out.impact <= 0.0) {
        out.base = 0.0;
    } else if (v.s == Scope::Unchanged) {
        out.base = roundup(std::min(out.impact + out.exploitability, 10.0));
    } else {
        out.base = roundup(std::min(kScopeCoefficient * (out.impact + out.exploitability), 10.0));
    }
    return out;
}

std::vector<CvssVector> enumerate_all_vectors() {
    std::vector<CvssVector> all;
    all.reserve(kVectorSpaceSize);
    CvssVector v;
    // Odometer over the canonical label orders, last component fastest.
    for (char av : component_labels(Component::AV)) {
        v.set_label(Component::AV, av);
        for (char ac : component_labels(Component::AC)) {
            v.set_label(Component::AC, ac);
            for (char pr : component_labels(Component::PR)) {
                v.set_label(Component::PR, pr);
                for (char ui : component_labels(Component::UI)) {
                    v.set_label(Component::UI, ui);
                    for (char s : component_labels(Component::S)) {
                        v.set_label(Component::S, s);
                        for (char c : component_labels(Component::C)) {
                            v.set_label(Component::C, c);
                            for (char i : component_labels(Component::I)) {
                                v.set_label(Component::I, i);
                                for (char a : component_labels(Component::A)) {
                                    v.set_label(Component::A, a);
                                    all.push_back(v);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return all;
}

} // namespace cvsskit
