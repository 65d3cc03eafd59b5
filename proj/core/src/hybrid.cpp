#include "cvsskit/hybrid.hpp"

#include "cvsskit/errors.hpp"

namespace cvsskit {

const char* to_string(Provenance p) {
    return p == Provenance::Llm ? "llm" : "embedding";
}

bool PredictedVector::complete() const {
    for (const ComponentPrediction& comp : components) {
        if (!comp.label) {
            return false;
        }
    }
    return true;
}

void PredictedVector::finalize() {
    if (!complete()) {
        assembled.reset();
        base.reset();
        return;
    }
    CvssVector v;
    for (Component comp : kAllComponents) {
        v.set_label(comp, *at(comp).label);
    }
    assembled = v;
    base = base_score(v).base;
}

RoutingMap RoutingMap::all(Provenance p) {
    RoutingMap map;
    map.source.fill(p);
    return map;
}

RoutingMap RoutingMap::default_map() {
    RoutingMap map = all(Provenance::Embedding);
    map.set(Component::AV, Provenance::Llm);
    map.set(Component::AC, Provenance::Llm);
    map.set(Component::UI, Provenance::Llm);
    return map;
}

PredictedVector route(const PredictedVector& llm_pred, const PredictedVector& emb_pred,
                      const RoutingMap& map, bool fallback_on_abstain) {
    if (llm_pred.cve_id != emb_pred.cve_id) {
        throw CveMismatch("routing inputs refer to different CVEs: " + llm_pred.cve_id + " vs " +
                          emb_pred.cve_id);
    }

    PredictedVector out;
    out.cve_id = llm_pred.cve_id;
    for (Component comp : kAllComponents) {
        const Provenance wanted = map.at(comp);
        const PredictedVector& primary = wanted == Provenance::Llm ? llm_pred : emb_pred;
        const PredictedVector& other = wanted == Provenance::Llm ? emb_pred : llm_pred;

        ComponentPrediction chosen = primary.at(comp);
        if (!chosen.label && fallback_on_abstain && other.at(comp).label) {
            chosen = other.at(comp);
            chosen.fallback = true;
        }
        out.at(comp) = std::move(chosen);
    }
    out.finalize();
    return out;
}

std::optional<double> score_prediction(const PredictedVector& pred) {
    if (!pred.complete()) {
        return std::nullopt;
    }
    CvssVector v;
    for (Component comp : kAllComponents) {
        v.set_label(comp, *pred.at(comp).label);
    }
    return base_score(v).base;
}

} // namespace cvsskit
