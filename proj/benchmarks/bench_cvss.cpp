#include <benchmark/benchmark.h>

#include "cvsskit/cvss.hpp"

namespace {

void BM_ParseVector(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cvsskit::parse_vector("CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H"));
    }
}
BENCHMARK(BM_ParseVector);

void BM_SerializeVector(benchmark::State& state) {
    const cvsskit::CvssVector v =
        cvsskit::parse_vector("CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H");
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::serialize_vector(v));
    }
}
BENCHMARK(BM_SerializeVector);

void BM_BaseScore(benchmark::State& state) {
    const cvsskit::CvssVector v =
        cvsskit::parse_vector("CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H");
    for (auto _ : state) {
        benchmark::DoNotOptimize(cvsskit::base_score(v));
    }
}
BENCHMARK(BM_BaseScore);

// the acceptance budget is the whole space in under a second
void BM_ScoreAllVectors(benchmark::State& state) {
    const auto all = cvsskit::enumerate_all_vectors();
    for (auto _ : state) {
        double sum = 0.0;
        for (const auto& v : all) {
            sum += cvsskit::base_score(v).base;
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * all.size()));
}
BENCHMARK(BM_ScoreAllVectors);

} // namespace

BENCHMARK_MAIN();
