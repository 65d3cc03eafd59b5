#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cvsskit/cvss.hpp"
#include "cvsskit/embed.hpp"
#include "cvsskit/prediction.hpp"

namespace cvsskit {

struct Hyperparams {
    double lr = 0.1;
    double l2 = 1e-4;
    std::size_t epochs = 200;
    std::size_t batch = 64;
    std::uint64_t seed = 42;
    bool class_weighting = false; // inverse-frequency weights, off by default

    bool operator==(const Hyperparams&) const = default;
};

/// Multinomial (softmax) logistic regression over one CVSS component.
/// Weights are [classes x (dim+1)] row-major, bias in the last column.
/// The class list is the component's full legal label set in canonical
/// order, whether or not every class occurs in the training data.
struct ComponentClassifier {
    Component component = Component::AV;
    std::string classes;   // ordered label letters, e.g. "NALP"
    std::size_t dim = 0;   // feature dimension without bias
    std::vector<double> weights;
    Hyperparams hyperparams;
    bool degenerate = false; // all training labels identical
    double final_loss = 0.0;

    std::size_t class_count() const { return classes.size(); }
    double weight_at(std::size_t cls, std::size_t col) const {
        return weights[cls * (dim + 1) + col];
    }
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad; // same layout as weights
};

struct PredictionResult {
    char label = '?';
    std::vector<double> probabilities; // aligned with classes, sums to 1
};

/// L2-regularized mean cross-entropy and its exact gradient over a batch.
/// The regularizer is l2 * sum(W^2) with bias columns excluded, so doubling
/// l2 adds exactly l2 * ||W||^2 to the loss.
LossGrad loss_and_grad(const ComponentClassifier& classifier,
                       const FeatureMatrix& features, const std::vector<char>& labels,
                       std::span<const std::size_t> batch_indices = {});

/// Mini-batch gradient descent with seeded shuffling. The epoch-loss
/// sequence is non-increasing: an epoch that raises the full-data loss is
/// rolled back and the learning rate halved. Identical (data, seed) yields
/// bit-identical weights.
ComponentClassifier train_component(const FeatureMatrix& features,
                                    const std::vector<char>& labels, Component component,
                                    const Hyperparams& hyperparams);

PredictionResult predict_component(const ComponentClassifier& classifier,
                                   std::span<const double> feature);

/// 8 per-component classifiers with their shared feature layout and
/// training manifest. Bundles serialize to versioned JSON and reload
/// bit-identically.
struct ModelBundle {
    std::array<ComponentClassifier, kComponentCount> classifiers;
    FeatureLayout layout;
    std::string embedding_model;
    std::string data_hash;
    std::uint64_t seed = 42;

    const ComponentClassifier& at(Component comp) const {
        return classifiers[static_cast<std::size_t>(comp)];
    }
};

/// Trains all 8 component classifiers on the same features.
ModelBundle train_bundle(const FeatureMatrix& features, const std::vector<CvssVector>& truths,
                         const Hyperparams& hyperparams, const std::string& embedding_model,
                         const std::string& data_hash);

/// All 8 components predicted, provenance=embedding, never an Abstain.
PredictedVector predict_vector_embeddings(const ModelBundle& bundle, const FeatureVector& features,
                                          const std::string& cve_id);

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);
void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

} // namespace cvsskit
