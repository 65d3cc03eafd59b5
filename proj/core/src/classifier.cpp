#include "cvsskit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cvsskit/errors.hpp"
#include "cvsskit/util.hpp"

namespace cvsskit {

namespace {

using nlohmann::json;

std::size_t class_index(const ComponentClassifier& classifier, char label) {
    const std::size_t pos = classifier.classes.find(label);
    if (pos == std::string::npos) {
        throw IllegalLabel(std::string("label '") + label + "' is not legal for " +
                           std::string(component_name(classifier.component)));
    }
    return pos;
}

// Stable softmax of logits, in place.
void softmax(std::vector<double>& logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - max_logit);
        sum += z;
    }
    for (double& z : logits) {
        z /= sum;
    }
}

std::vector<double> logits_for(const ComponentClassifier& classifier,
                               std::span<const double> feature) {
    const std::size_t k = classifier.class_count();
    const std::size_t stride = classifier.dim + 1;
    std::vector<double> logits(k);
    for (std::size_t cls = 0; cls < k; ++cls) {
        const double* w = classifier.weights.data() + cls * stride;
        double z = w[classifier.dim]; // bias
        for (std::size_t j = 0; j < classifier.dim; ++j) {
            z += w[j] * feature[j];
        }
        logits[cls] = z;
    }
    return logits;
}

std::vector<double> class_weights(const ComponentClassifier& classifier,
                                  const FeatureMatrix& features,
                                  const std::vector<char>& labels) {
    std::vector<double> weights(features.rows, 1.0);
    if (!classifier.hyperparams.class_weighting) {
        return weights;
    }
    std::vector<std::size_t> counts(classifier.class_count(), 0);
    for (char label : labels) {
        ++counts[class_index(classifier, label)];
    }
    std::size_t present = 0;
    for (std::size_t count : counts) {
        present += count > 0 ? 1 : 0;
    }
    for (std::size_t i = 0; i < features.rows; ++i) {
        const std::size_t cls = class_index(classifier, labels[i]);
        weights[i] = static_cast<double>(features.rows) /
                     (static_cast<double>(present) * static_cast<double>(counts[cls]));
    }
    return weights;
}

} // namespace

LossGrad loss_and_grad(const ComponentClassifier& classifier, const FeatureMatrix& features,
                       const std::vector<char>& labels,
                       std::span<const std::size_t> batch_indices) {
    if (features.rows != labels.size()) {
        throw LengthMismatch("feature rows (" + std::to_string(features.rows) +
                             ") != labels (" + std::to_string(labels.size()) + ")");
    }
    if (features.layout.total_dim() != classifier.dim) {
        throw DimensionMismatch("classifier expects dim " + std::to_string(classifier.dim) +
                                ", features have " + std::to_string(features.layout.total_dim()));
    }

    std::vector<std::size_t> all;
    if (batch_indices.empty()) {
        all = index_range(features.rows);
        batch_indices = all;
    }
    if (batch_indices.empty()) {
        throw LengthMismatch("empty batch");
    }

    const std::size_t k = classifier.class_count();
    const std::size_t stride = classifier.dim + 1;
    const std::vector<double> sample_weights = class_weights(classifier, features, labels);

    LossGrad out;
    out.grad.assign(classifier.weights.size(), 0.0);

    double weight_total = 0.0;
    double data_loss = 0.0;
    for (const std::size_t row : batch_indices) {
        const double* x = features.row(row);
        const std::size_t y = class_index(classifier, labels[row]);
        const double w = sample_weights[row];
        weight_total += w;

        std::vector<double> probs = logits_for(classifier, {x, classifier.dim});
        softmax(probs);

        data_loss -= w * std::log(std::max(probs[y], 1e-300));
        for (std::size_t cls = 0; cls < k; ++cls) {
            const double delta = w * (probs[cls] - (cls == y ? 1.0 : 0.0));
            double* g = out.grad.data() + cls * stride;
            for (std::size_t j = 0; j < classifier.dim; ++j) {
                g[j] += delta * x[j];
            }
            g[classifier.dim] += delta;
        }
    }

    out.loss = data_loss / weight_total;
    for (double& g : out.grad) {
        g /= weight_total;
    }

    // l2 * ||W||^2, bias column excluded.
    const double l2 = classifier.hyperparams.l2;
    if (l2 != 0.0) {
        double reg = 0.0;
        for (std::size_t cls = 0; cls < k; ++cls) {
            for (std::size_t j = 0; j < classifier.dim; ++j) {
                const double w = classifier.weights[cls * stride + j];
                reg += w * w;
                out.grad[cls * stride + j] += 2.0 * l2 * w;
            }
        }
        out.loss += l2 * reg;
    }
    return out;
}

ComponentClassifier train_component(const FeatureMatrix& features, const std::vector<char>& labels,
                                    Component component, const Hyperparams& hyperparams) {
    if (features.rows != labels.size()) {
        throw LengthMismatch("feature rows != labels");
    }
    if (features.rows < 2) {
        throw TooFewRecords("need at least 2 training rows, have " +
                            std::to_string(features.rows));
    }

    ComponentClassifier classifier;
    classifier.component = component;
    classifier.classes = std::string(component_labels(component));
    classifier.dim = features.layout.total_dim();
    classifier.hyperparams = hyperparams;
    classifier.weights.assign(classifier.class_count() * (classifier.dim + 1), 0.0);

    for (char label : labels) {
        class_index(classifier, label); // throws IllegalLabel early
    }

    const bool all_same = std::all_of(labels.begin(), labels.end(),
                                      [&labels](char l) { return l == labels.front(); });
    if (all_same) {
        // Constant classifier: bias strongly favors the single seen class.
        classifier.degenerate = true;
        const std::size_t cls = class_index(classifier, labels.front());
        classifier.weights[cls * (classifier.dim + 1) + classifier.dim] = 1.0;
        classifier.final_loss = loss_and_grad(classifier, features, labels).loss;
        return classifier;
    }

    std::mt19937_64 rng(hyperparams.seed);
    std::vector<std::size_t> order = index_range(features.rows);

    double lr = hyperparams.lr;
    double best_loss = loss_and_grad(classifier, features, labels).loss;
    std::vector<double> best_weights = classifier.weights;

    for (std::size_t epoch = 0; epoch < hyperparams.epochs; ++epoch) {
        // Fisher-Yates on the continuing seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }

        const std::size_t batch = std::max<std::size_t>(1, hyperparams.batch);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t count = std::min(batch, order.size() - start);
            const LossGrad step =
                loss_and_grad(classifier, features, labels, {order.data() + start, count});
            for (std::size_t w = 0; w < classifier.weights.size(); ++w) {
                classifier.weights[w] -= lr * step.grad[w];
            }
        }

        const double epoch_loss = loss_and_grad(classifier, features, labels).loss;
        if (epoch_loss > best_loss) {
            classifier.weights = best_weights; // roll back, try gentler steps
            lr *= 0.5;
        } else {
            best_loss = epoch_loss;
            best_weights = classifier.weights;
        }
    }

    classifier.weights = best_weights;
    classifier.final_loss = best_loss;
    return classifier;
}

PredictionResult predict_component(const ComponentClassifier& classifier,
                                   std::span<const double> feature) {
    if (feature.size() != classifier.dim) {
        throw DimensionMismatch("feature length " + std::to_string(feature.size()) +
                                " != classifier dim " + std::to_string(classifier.dim));
    }
    PredictionResult result;
    if (classifier.degenerate) {
        // Constant classifier: the one training class, probability exactly 1.
        const std::size_t stride = classifier.dim + 1;
        std::size_t cls = 0;
        for (std::size_t k = 1; k < classifier.class_count(); ++k) {
            if (classifier.weights[k * stride + classifier.dim] >
                classifier.weights[cls * stride + classifier.dim]) {
                cls = k;
            }
        }
        result.probabilities.assign(classifier.class_count(), 0.0);
        result.probabilities[cls] = 1.0;
        result.label = classifier.classes[cls];
        return result;
    }
    result.probabilities = logits_for(classifier, feature);
    softmax(result.probabilities);

    // Ties break toward the earlier label in the class order.
    std::size_t best = 0;
    for (std::size_t cls = 1; cls < result.probabilities.size(); ++cls) {
        if (result.probabilities[cls] > result.probabilities[best]) {
            best = cls;
        }
    }
    result.label = classifier.classes[best];
    return result;
}

ModelBundle train_bundle(const FeatureMatrix& features, const std::vector<CvssVector>& truths,
                         const Hyperparams& hyperparams, const std::string& embedding_model,
                         const std::string& data_hash) {
    if (features.rows != truths.size()) {
        throw LengthMismatch("feature rows != truth vectors");
    }
    ModelBundle bundle;
    bundle.layout = features.layout;
    bundle.embedding_model = embedding_model;
    bundle.data_hash = data_hash;
    bundle.seed = hyperparams.seed;
    for (Component comp : kAllComponents) {
        std::vector<char> labels;
        labels.reserve(truths.size());
        for (const CvssVector& truth : truths) {
            labels.push_back(truth.label(comp));
        }
        bundle.classifiers[static_cast<std::size_t>(comp)] =
            train_component(features, labels, comp, hyperparams);
    }
    return bundle;
}

PredictedVector predict_vector_embeddings(const ModelBundle& bundle, const FeatureVector& features,
                                          const std::string& cve_id) {
    if (features.layout != bundle.layout) {
        throw DimensionMismatch("feature layout does not match the bundle layout");
    }
    PredictedVector pred;
    pred.cve_id = cve_id;
    for (Component comp : kAllComponents) {
        const PredictionResult result =
            predict_component(bundle.at(comp), std::span<const double>(features.values));
        ComponentPrediction& slot = pred.at(comp);
        slot.label = result.label;
        slot.provenance = Provenance::Embedding;
        slot.raw_ref = "bundle";
    }
    pred.finalize();
    return pred;
}

namespace {

json classifier_to_json(const ComponentClassifier& classifier) {
    json out;
    out["component"] = std::string(component_name(classifier.component));
    out["classes"] = classifier.classes;
    out["dim"] = classifier.dim;
    out["weights"] = classifier.weights;
    out["degenerate"] = classifier.degenerate;
    out["final_loss"] = classifier.final_loss;
    out["hyperparams"] = {
        {"lr", classifier.hyperparams.lr},       {"l2", classifier.hyperparams.l2},
        {"epochs", classifier.hyperparams.epochs}, {"batch", classifier.hyperparams.batch},
        {"seed", classifier.hyperparams.seed},
        {"class_weighting", classifier.hyperparams.class_weighting},
    };
    return out;
}

ComponentClassifier classifier_from_json(const json& doc) {
    ComponentClassifier classifier;
    Component comp;
    if (!component_from_name(doc.at("component").get<std::string>(), comp)) {
        throw ConfigError("bundle names unknown component: " +
                          doc.at("component").get<std::string>());
    }
    classifier.component = comp;
    classifier.classes = doc.at("classes").get<std::string>();
    classifier.dim = doc.at("dim").get<std::size_t>();
    classifier.weights = doc.at("weights").get<std::vector<double>>();
    classifier.degenerate = doc.at("degenerate").get<bool>();
    classifier.final_loss = doc.at("final_loss").get<double>();
    const json& hp = doc.at("hyperparams");
    classifier.hyperparams.lr = hp.at("lr").get<double>();
    classifier.hyperparams.l2 = hp.at("l2").get<double>();
    classifier.hyperparams.epochs = hp.at("epochs").get<std::size_t>();
    classifier.hyperparams.batch = hp.at("batch").get<std::size_t>();
    classifier.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
    classifier.hyperparams.class_weighting = hp.at("class_weighting").get<bool>();
    if (classifier.weights.size() != classifier.class_count() * (classifier.dim + 1)) {
        throw ConfigError("bundle weight matrix has wrong shape for " +
                          std::string(component_name(comp)));
    }
    return classifier;
}

} // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
    json out;
    out["format"] = "cvsskit-bundle";
    out["version"] = 1;
    out["layout"] = {{"mode", feature_mode_name(bundle.layout.mode)},
                     {"segment_dim", bundle.layout.segment_dim}};
    out["embedding_model"] = bundle.embedding_model;
    out["manifest"] = {{"data_hash", bundle.data_hash}, {"seed", bundle.seed}};
    out["classifiers"] = json::array();
    for (const ComponentClassifier& classifier : bundle.classifiers) {
        out["classifiers"].push_back(classifier_to_json(classifier));
    }
    return out.dump(2);
}

ModelBundle bundle_from_json(const std::string& text) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || doc.value("format", "") != "cvsskit-bundle") {
        throw ConfigError("not a cvsskit model bundle");
    }
    ModelBundle bundle;
    bundle.layout.mode = feature_mode_from_name(doc.at("layout").at("mode").get<std::string>());
    bundle.layout.segment_dim = doc.at("layout").at("segment_dim").get<std::size_t>();
    bundle.embedding_model = doc.at("embedding_model").get<std::string>();
    bundle.data_hash = doc.at("manifest").at("data_hash").get<std::string>();
    bundle.seed = doc.at("manifest").at("seed").get<std::uint64_t>();

    const json& classifiers = doc.at("classifiers");
    if (!classifiers.is_array() || classifiers.size() != kComponentCount) {
        throw ConfigError("bundle must hold exactly 8 classifiers");
    }
    std::array<bool, kComponentCount> seen{};
    for (const json& entry : classifiers) {
        ComponentClassifier classifier = classifier_from_json(entry);
        const auto index = static_cast<std::size_t>(classifier.component);
        if (seen[index]) {
            throw ConfigError("bundle repeats component " +
                              std::string(component_name(classifier.component)));
        }
        seen[index] = true;
        bundle.classifiers[index] = std::move(classifier);
    }
    return bundle;
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle) {
    write_file(path, bundle_to_json(bundle));
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    return bundle_from_json(read_file(path));
}

} // namespace cvsskit
