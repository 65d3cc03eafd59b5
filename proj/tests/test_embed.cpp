#include <doctest.h>

#include "cvsskit/embed.hpp"
#include "cvsskit/errors.hpp"
#include "mock_openai.hpp"
#include "support.hpp"

using namespace cvsskit;

namespace {

EmbedParams fast_params(const std::filesystem::path& cache_dir = {}) {
    EmbedParams params;
    params.timeout_s = 5;
    params.max_retries = 1;
    params.backoff_base_ms = 1;
    params.cache_dir = cache_dir;
    return params;
}

// 4-dim embedding derived from text length so rows are distinguishable.
std::vector<double> toy_embedding(const std::string& text) {
    const auto n = static_cast<double>(text.size());
    return {n, n / 2.0, 1.0, 0.0};
}

} // namespace

TEST_CASE("mock endpoint with fixed 4-dim vectors shapes the matrix") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    const EmbeddingMatrix matrix = embedder.embed({"alpha", "longer text here"});
    CHECK(matrix.rows == 2);
    CHECK(matrix.dim == 4);
    CHECK(matrix.model_name == "toy-model");
    CHECK(matrix.row(0)[0] == doctest::Approx(5.0));
    CHECK(matrix.row(1)[0] == doctest::Approx(16.0));
}

TEST_CASE("identical texts give identical rows") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    const EmbeddingMatrix matrix = embedder.embed({"same", "same"});
    REQUIRE(matrix.rows == 2);
    for (std::size_t j = 0; j < matrix.dim; ++j) {
        CHECK(matrix.row(0)[j] == matrix.row(1)[j]);
    }
}

TEST_CASE("cache hit performs zero HTTP calls") {
    testsupport::TempDir tmp;
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;

    HttpEmbedder embedder(mock.url(), "toy-model", fast_params(tmp.path() / "cache"));
    const EmbeddingMatrix first = embedder.embed({"alpha", "beta"});
    CHECK(mock.embed_requests() == 1);

    const EmbeddingMatrix again = embedder.embed({"alpha", "beta"});
    CHECK(mock.embed_requests() == 1); // untouched
    for (std::size_t j = 0; j < first.dim; ++j) {
        CHECK(first.row(0)[j] == again.row(0)[j]);
        CHECK(first.row(1)[j] == again.row(1)[j]);
    }

    // a fresh client over the same cache dir also stays offline
    HttpEmbedder second(mock.url(), "toy-model", fast_params(tmp.path() / "cache"));
    second.embed({"beta", "alpha"});
    CHECK(mock.embed_requests() == 1);

    // a different model name misses the cache
    HttpEmbedder other_model(mock.url(), "other-model", fast_params(tmp.path() / "cache"));
    other_model.embed({"alpha"});
    CHECK(mock.embed_requests() == 2);
}

TEST_CASE("dimension drift across batches is rejected") {
    testsupport::TempDir tmp;
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params(tmp.path() / "cache"));
    embedder.embed({"alpha"});

    mock.embed_responder = [](const std::string&) { return std::vector<double>{1.0, 2.0}; };
    CHECK_THROWS_AS(embedder.embed({"alpha", "fresh text"}), DimensionMismatch);
}

TEST_CASE("non-finite embedding values are rejected") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = [](const std::string&) {
        return std::vector<double>{1.0, std::numeric_limits<double>::infinity()};
    };
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());
    CHECK_THROWS_AS(embedder.embed({"x"}), BadResponseShape);
}

TEST_CASE("desc-only features are a single segment") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    EnrichedRecord record;
    record.record.description = "desc";
    const FeatureVector features = build_features(record, FeatureMode::DescOnly, embedder);
    CHECK(features.layout.segments() == 1);
    CHECK(features.values.size() == 4);
}

TEST_CASE("desc+cwe features with no CWE zero segments 2..4") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    EnrichedRecord record;
    record.record.description = "desc";
    const FeatureVector features = build_features(record, FeatureMode::DescPlusCwe, embedder);
    REQUIRE(features.values.size() == 16);
    CHECK(features.layout.total_dim() == 16);
    for (std::size_t j = 4; j < 16; ++j) {
        CHECK(features.values[j] == 0.0);
    }
    // description segment itself is nonzero
    CHECK(features.values[0] != 0.0);
}

TEST_CASE("desc+cwe features with one CWE fill all four segments") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    EnrichedRecord record;
    record.record.description = "desc";
    CweEntry entry;
    entry.id = "CWE-89";
    entry.description = "sql injection";
    entry.common_consequences = "data loss";
    entry.potential_mitigations = "prepared statements";
    record.cwe_texts.push_back(entry);

    const FeatureVector features = build_features(record, FeatureMode::DescPlusCwe, embedder);
    REQUIRE(features.values.size() == 16);
    for (std::size_t segment = 0; segment < 4; ++segment) {
        CHECK(features.values[segment * 4] != 0.0);
    }
}

TEST_CASE("multiple CWE texts join with blank-line separators") {
    EnrichedRecord record;
    CweEntry a, b;
    a.description = "first";
    b.description = "second";
    record.cwe_texts = {a, b};
    CHECK(joined_cwe_field(record, 0) == "first\n\nsecond");
    CHECK(joined_cwe_field(record, 1).empty());
}

TEST_CASE("feature matrix rows align with records") {
    testsupport::MockOpenAiServer mock;
    mock.embed_responder = toy_embedding;
    HttpEmbedder embedder(mock.url(), "toy-model", fast_params());

    std::vector<EnrichedRecord> records(3);
    records[0].record.description = "a";
    records[1].record.description = "bb";
    records[2].record.description = "ccc";
    const FeatureMatrix matrix = build_feature_matrix(records, FeatureMode::DescOnly, embedder);
    CHECK(matrix.rows == 3);
    CHECK(matrix.row(0)[0] == doctest::Approx(1.0));
    CHECK(matrix.row(1)[0] == doctest::Approx(2.0));
    CHECK(matrix.row(2)[0] == doctest::Approx(3.0));
}
