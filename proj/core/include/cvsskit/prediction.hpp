#pragma once

#include <array>
#include <optional>
#include <string>

#include "cvsskit/cvss.hpp"

namespace cvsskit {

enum class Provenance { Llm, Embedding };

const char* to_string(Provenance p);

/// One predicted component: a label letter or Abstain (nullopt), tagged
/// with where it came from. `raw_ref` points back into the audit trail.
struct ComponentPrediction {
    std::optional<char> label;
    Provenance provenance = Provenance::Llm;
    std::string raw_ref;
    bool fallback = false; // filled from the other source after an Abstain
};

/// Per-component predictions for one CVE. The assembled vector and score
/// exist exactly when no component abstained.
struct PredictedVector {
    std::string cve_id;
    std::array<ComponentPrediction, kComponentCount> components;
    std::optional<CvssVector> assembled;
    std::optional<double> base;

    ComponentPrediction& at(Component comp) { return components[static_cast<std::size_t>(comp)]; }
    const ComponentPrediction& at(Component comp) const {
        return components[static_cast<std::size_t>(comp)];
    }

    bool complete() const;

    /// Recomputes `assembled` and `base` from the component labels.
    void finalize();
};

} // namespace cvsskit
