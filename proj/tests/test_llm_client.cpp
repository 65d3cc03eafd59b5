#include <doctest.h>

#include <algorithm>

#include "cvsskit/errors.hpp"
#include "cvsskit/llm_client.hpp"
#include "cvsskit/util.hpp"
#include "mock_openai.hpp"
#include "support.hpp"

using namespace cvsskit;

namespace {

ChatParams fast_params() {
    ChatParams params;
    params.timeout_s = 5;
    params.max_retries = 3;
    params.backoff_base_ms = 1; // keep retry tests quick
    return params;
}

EnrichedRecord record_with(const std::string& id, const std::string& desc) {
    EnrichedRecord record;
    record.record.id = id;
    record.record.description = desc;
    return record;
}

PromptTemplates templates() {
    return PromptTemplates::load(testsupport::config_dir() / "templates");
}

} // namespace

TEST_CASE("chat_complete returns the mock content verbatim") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string&) { return "CVSS:3.1/AV:N/..."; };

    const ChatClient client(mock.url(), "mock-model", fast_params());
    const LlmResponse response = client.complete("hello", "system text");
    CHECK(response.raw == "CVSS:3.1/AV:N/...");
    CHECK(response.attempt == 1);
    CHECK(response.model == "mock-model");
    CHECK(mock.chat_requests() == 1);
}

TEST_CASE("chat_complete strips reasoning into the stripped field") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string&) {
        return "<think>let me reason</think>The answer";
    };
    const ChatClient client(mock.url(), "m", fast_params());
    const LlmResponse response = client.complete("p", "");
    CHECK(response.raw == "<think>let me reason</think>The answer");
    CHECK(response.stripped == "The answer");
}

TEST_CASE("two 429s then success lands on attempt 3") {
    testsupport::MockOpenAiServer mock;
    mock.script_statuses({429, 429});
    mock.chat_responder = [](const std::string&) { return "fine"; };

    const ChatClient client(mock.url(), "m", fast_params());
    const LlmResponse response = client.complete("p", "");
    CHECK(response.raw == "fine");
    CHECK(response.attempt == 3);
    CHECK(mock.chat_requests() == 3);
}

TEST_CASE("permanent 500 exhausts retries after max_retries+1 attempts") {
    testsupport::MockOpenAiServer mock;
    mock.script_statuses({500, 500, 500, 500, 500, 500});
    ChatParams params = fast_params();
    params.max_retries = 2;

    const ChatClient client(mock.url(), "m", params);
    CHECK_THROWS_AS(client.complete("p", ""), RateLimitedExhausted);
    CHECK(mock.chat_requests() == 3);
}

TEST_CASE("unreachable endpoint raises EndpointUnreachable") {
    ChatParams params = fast_params();
    params.max_retries = 0;
    params.timeout_s = 1;
    const ChatClient client("http://127.0.0.1:1", "m", params);
    CHECK_THROWS_AS(client.complete("p", ""), EndpointUnreachable);
}

TEST_CASE("non-retryable status and malformed body raise BadResponseShape") {
    testsupport::MockOpenAiServer mock;
    mock.script_statuses({404});
    const ChatClient client(mock.url(), "m", fast_params());
    CHECK_THROWS_AS(client.complete("p", ""), BadResponseShape);
    CHECK(mock.chat_requests() == 1); // no retry on 404
}

TEST_CASE("predict_vanilla fills all components from a canonical answer") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string&) {
        return "CVSS:3.1/AV:N/AC:H/PR:L/UI:R/S:C/C:L/I:L/A:H";
    };
    const ChatClient client(mock.url(), "m", fast_params());
    const auto tpl = templates();

    const std::vector<EnrichedRecord> records = {
        record_with("CVE-2025-1", "first bug"),
        record_with("CVE-2025-2", "second bug"),
    };
    const auto preds =
        predict_vanilla(records, PromptVariant::base(), tpl, nullptr, client, {});
    REQUIRE(preds.size() == 2);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        CHECK(preds[i].cve_id == records[i].record.id); // position-stable
        CHECK(preds[i].complete());
        CHECK(preds[i].at(Component::AV).label == 'N');
        CHECK(preds[i].at(Component::AV).provenance == Provenance::Llm);
        REQUIRE(preds[i].base.has_value());
        CHECK(*preds[i].base == doctest::Approx(7.1));
    }
}

TEST_CASE("per-component variant issues exactly 8 queries per record") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string& prompt) {
        // answer the named component with a fixed legal letter
        if (prompt.find("(AV)") != std::string::npos) return std::string("N");
        if (prompt.find("(AC)") != std::string::npos) return std::string("L");
        if (prompt.find("(PR)") != std::string::npos) return std::string("N");
        if (prompt.find("(UI)") != std::string::npos) return std::string("N");
        if (prompt.find("(S)") != std::string::npos) return std::string("U");
        return std::string("H");
    };
    const ChatClient client(mock.url(), "m", fast_params());
    const auto tpl = templates();

    const std::vector<EnrichedRecord> records = {record_with("CVE-2025-3", "one record")};
    const auto preds = predict_vanilla(records, PromptVariant::per_component(Component::AV), tpl,
                                       nullptr, client, {});
    CHECK(mock.chat_requests() == 8);
    REQUIRE(preds.size() == 1);
    CHECK(preds[0].complete());
    REQUIRE(preds[0].assembled.has_value());
    CHECK(serialize_vector(*preds[0].assembled) == "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
}

TEST_CASE("prose answer for one component leaves that component Abstain") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string& prompt) {
        if (prompt.find("Availability") != std::string::npos) {
            return std::string("It depends on deployment specifics.");
        }
        return std::string("N");
    };
    ChatParams params = fast_params();
    const ChatClient client(mock.url(), "m", params);
    const auto tpl = templates();

    const std::vector<EnrichedRecord> records = {record_with("CVE-2025-4", "bug")};
    auto preds = predict_vanilla(records, PromptVariant::per_component(Component::AV), tpl,
                                 nullptr, client, {});
    REQUIRE(preds.size() == 1);
    CHECK(!preds[0].at(Component::A).label.has_value());
    CHECK(!preds[0].complete());
    CHECK(!preds[0].assembled.has_value());
    CHECK(!preds[0].base.has_value());
    // the other components still resolved
    CHECK(preds[0].at(Component::AV).label == 'N');
}

TEST_CASE("garbled full-vector answer leaves every component Abstain but keeps batch order") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string& prompt) {
        if (prompt.find("second") != std::string::npos) {
            return std::string("I am not able to help with that.");
        }
        return std::string("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:N/I:H/A:L");
    };
    const ChatClient client(mock.url(), "m", fast_params());
    const auto tpl = templates();

    const std::vector<EnrichedRecord> records = {
        record_with("CVE-2025-5", "first bug"),
        record_with("CVE-2025-6", "second bug"),
        record_with("CVE-2025-7", "third bug"),
    };
    PredictOptions options;
    options.max_in_flight = 3;
    const auto preds =
        predict_vanilla(records, PromptVariant::base(), tpl, nullptr, client, options);
    REQUIRE(preds.size() == 3);
    CHECK(preds[0].complete());
    CHECK(!preds[1].complete());
    CHECK(preds[2].complete());
    CHECK(preds[1].cve_id == "CVE-2025-6");
}

TEST_CASE("audit sink records one line per exchange") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string&) { return "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N"; };
    const ChatClient client(mock.url(), "m", fast_params());
    const auto tpl = templates();

    testsupport::TempDir tmp;
    const auto audit_path = tmp.path() / "responses.jsonl";
    {
        AuditWriter writer(audit_path);
        const std::vector<EnrichedRecord> records = {record_with("CVE-2025-8", "bug"),
                                                     record_with("CVE-2025-9", "bug2")};
        predict_vanilla(records, PromptVariant::base(), tpl, nullptr, client, {}, writer);
    }
    const std::string text = read_file(audit_path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("CVE-2025-8") != std::string::npos);
    CHECK(text.find("\"variant\":\"base\"") != std::string::npos);
}

TEST_CASE("api key travels as a bearer token, absent key sends no header") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string&) { return "x"; };

    ChatParams with_key = fast_params();
    with_key.api_key = "sk-test-123";
    ChatClient(mock.url(), "m", with_key).complete("p", "");
    CHECK(mock.last_authorization() == "Bearer sk-test-123");

    ChatClient(mock.url(), "m", fast_params()).complete("p", "");
    CHECK(mock.last_authorization().empty());
}

TEST_CASE("direct scoring normalizes numbers and abstains on prose") {
    testsupport::MockOpenAiServer mock;
    mock.chat_responder = [](const std::string& prompt) {
        if (prompt.find("first") != std::string::npos) {
            return std::string("Base score: 7.5");
        }
        return std::string("unclear");
    };
    const ChatClient client(mock.url(), "m", fast_params());
    const auto tpl = templates();

    const std::vector<EnrichedRecord> records = {record_with("CVE-2025-10", "first bug"),
                                                 record_with("CVE-2025-11", "other bug")};
    const auto scores = predict_direct_scores(records, tpl, client, {});
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(7.5));
    CHECK(!scores[1].has_value());
}
