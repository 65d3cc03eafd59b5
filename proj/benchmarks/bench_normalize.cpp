#include <benchmark/benchmark.h>

#include "cvsskit/normalize.hpp"

namespace {

void BM_StripReasoning(benchmark::State& state) {
    const std::string text = "<think>step one\nstep two\nstep three</think>"
                             "CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H";
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::strip_reasoning(text));
    }
}
BENCHMARK(BM_StripReasoning);

void BM_NormalizeCanonical(benchmark::State& state) {
    const std::string text = "The vector is CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H.";
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::normalize_vector_response(text));
    }
}
BENCHMARK(BM_NormalizeCanonical);

void BM_NormalizeComponentwiseProse(benchmark::State& state) {
    const std::string text =
        "Attack Vector: Network, Attack Complexity: High, Privileges Required: Low, "
        "User Interaction: Required, Scope: Changed, Confidentiality: Low, "
        "Integrity: Low, Availability: High";
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::normalize_vector_response(text));
    }
}
BENCHMARK(BM_NormalizeComponentwiseProse);

void BM_NormalizeAbstain(benchmark::State& state) {
    const std::string text = "I am unable to provide a classification for this description.";
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::normalize_vector_response(text));
    }
}
BENCHMARK(BM_NormalizeAbstain);

} // namespace
