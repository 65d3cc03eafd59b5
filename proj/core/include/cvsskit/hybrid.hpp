#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "cvsskit/prediction.hpp"

namespace cvsskit {

/// Per-component source selection between the two predictors.
struct RoutingMap {
    std::array<Provenance, kComponentCount> source{};

    Provenance at(Component comp) const { return source[static_cast<std::size_t>(comp)]; }
    void set(Component comp, Provenance p) { source[static_cast<std::size_t>(comp)] = p; }

    static RoutingMap all(Provenance p);

    /// AV, AC, UI from the LLM; PR, S and the impact metrics from
    /// embeddings.
    static RoutingMap default_map();

    bool operator==(const RoutingMap&) const = default;
};

/// Combines two predictions for the same CVE component-wise. When the
/// mapped source abstained on a component, the other source fills in and
/// the component is flagged as a fallback (disable via fallback_on_abstain
/// to mirror strict routing). Throws CveMismatch on differing ids.
PredictedVector route(const PredictedVector& llm_pred, const PredictedVector& emb_pred,
                      const RoutingMap& map, bool fallback_on_abstain = true);

/// Base score of the assembled vector; nullopt (Unscorable) when any
/// component is still missing after fallback.
std::optional<double> score_prediction(const PredictedVector& pred);

} // namespace cvsskit
