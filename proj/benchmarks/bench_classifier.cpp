#include <benchmark/benchmark.h>

#include <random>

#include "cvsskit/classifier.hpp"

namespace {

using namespace cvsskit;

std::pair<FeatureMatrix, std::vector<char>> synthetic(std::size_t rows, std::size_t dim) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    FeatureMatrix features;
    features.layout.mode = FeatureMode::DescOnly;
    features.layout.segment_dim = dim;
    features.rows = rows;
    features.values.reserve(rows * dim);
    std::vector<char> labels;
    const std::string_view classes = component_labels(Component::PR);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            features.values.push_back(dist(rng));
        }
        labels.push_back(classes[i % classes.size()]);
    }
    return {features, labels};
}

void BM_LossAndGrad(benchmark::State& state) {
    const auto [features, labels] = synthetic(static_cast<std::size_t>(state.range(0)), 64);
    ComponentClassifier classifier;
    classifier.component = Component::PR;
    classifier.classes = std::string(component_labels(Component::PR));
    classifier.dim = 64;
    classifier.weights.assign(classifier.class_count() * 65, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_grad(classifier, features, labels));
    }
}
BENCHMARK(BM_LossAndGrad)->Arg(64)->Arg(512);

void BM_TrainComponent(benchmark::State& state) {
    const auto [features, labels] = synthetic(256, 32);
    Hyperparams hp;
    hp.epochs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_component(features, labels, Component::PR, hp));
    }
}
BENCHMARK(BM_TrainComponent)->Arg(5)->Arg(20);

void BM_PredictComponent(benchmark::State& state) {
    const auto [features, labels] = synthetic(32, 384);
    Hyperparams hp;
    hp.epochs = 1;
    const ComponentClassifier classifier =
        train_component(features, labels, Component::PR, hp);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            predict_component(classifier, std::span<const double>(features.row(0), 384)));
    }
}
BENCHMARK(BM_PredictComponent);

} // namespace
