// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <deque>
#include <mutex>

#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"
#include "chipdse/llm_backend.hpp"
#include "helpers.hpp"

using namespace chipdse;
using nlohmann::json;

namespace {

std::string reply(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

const std::string kGood =
    "Plans below.\n```json\n"
    R"([{"configs": ["1|64-7-256|0-OS-0|0|2D-NA-DDR5|NA|ring"], "rationale": "small", "target_region": "2D"}])"
    "\n```\n";

// Replays scripted bodies; an entry starting with "!" is thrown as a BackendError.
class FakeTransport final : public ChatTransport {
public:
    std::deque<std::string> script;
    std::vector<json> requests;

    std::string post(const std::string& body) override {
        std::lock_guard lock(mu_);
        requests.push_back(json::parse(body));
        if (script.empty()) throw BackendError("script exhausted");
        auto next = script.front();
        script.pop_front();
        if (!next.empty() && next[0] == '!') throw BackendError(next.substr(1));
        return next;
    }

private:
    std::mutex mu_;
};

PlanRequest request() {
    PlanRequest req;
    req.workload = builtin_workloads()[5];
    req.profile = resolve_profile("mobile");
    req.iteration = 1;
    req.n_plans = 3;
    req.plan_size = 5;
    req.agents_doc = "SYSTEM DOC";
    req.model_info_doc = "MODEL DOC";
    req.blacklist_doc = "{\"rules\": []}";
    req.effort = Effort::High;
    return req;
}

}  // namespace

TEST_CASE("fenced block extraction") {
    CHECK(extract_fenced_block("x\n```json\n[1]\n```\ny") == "[1]\n");
    CHECK(extract_fenced_block("```\n{}\n```\n```json\n[2]\n```") == "[2]\n");
    CHECK(extract_fenced_block("```\n{}\n```") == "{}\n");
    CHECK(extract_fenced_block("```python\nprint()\n```") == std::nullopt);
    CHECK(extract_fenced_block("no fence") == std::nullopt);
    CHECK(extract_fenced_block("```json\n[1]") == std::nullopt);
}

TEST_CASE("plan block decoding") {
    const auto a = parse_plan_block(R"([{"configs": ["x", "y"], "rationale": "r", "target_region": "t"}])");
    REQUIRE(a.plans.size() == 1);
    CHECK(a.plans[0] == RawPlan{{"x", "y"}, "r", "t"});
    const auto b = parse_plan_block(R"({"plans": [{"configs": ["x"]}], "insights": "split-K"})");
    CHECK(b.insights == "split-K");
    CHECK(b.plans[0].rationale.empty());
    CHECK_THROWS_AS(parse_plan_block("[1, 2"), ParseError);
    CHECK_THROWS_AS(parse_plan_block("[]"), ParseError);
    CHECK_THROWS_AS(parse_plan_block(R"({"other": 1})"), ParseError);
    CHECK_THROWS_AS(parse_plan_block(R"([{"configs": []}])"), ParseError);
    CHECK_THROWS_AS(parse_plan_block(R"([{"configs": [3]}])"), ParseError);
    CHECK_THROWS_AS(parse_plan_block(R"(["x"])"), ParseError);
    // Infeasible but well-formed configs pass through; the orchestrator deals with them.
    CHECK(parse_plan_block(R"([{"configs": ["1|64-7-256|0-OS-0|0|2D-NA-HBM3|NA|ring"]}])").plans.size() == 1);
}

TEST_CASE("user message") {
    auto req = request();
    const auto first = render_user_message(req, kDigestLimit);
    CHECK(first.find("Workload WL-6: GEMM with M=1316 K=24 N=144.") != std::string::npos);
    CHECK(first.find("Produce exactly 3 exploration plans") != std::string::npos);
    CHECK(first.find("MODEL DOC") != std::string::npos);
    CHECK(first.find("# Evolving context") == std::string::npos);
    CHECK(first.find("# Replacement round") == std::string::npos);

    req.iteration = 2;
    req.digest = std::string(100000, 'x') + "\n";
    const auto second = render_user_message(req, 4096);
    CHECK(second.find("# Evolving context") != std::string::npos);
    CHECK(second.size() < 4096 + first.size() + 64);

    req.round = 2;
    req.repair_note = "'a' violates b";
    CHECK(render_user_message(req, 4096).find("# Replacement round 2\nSome configurations were rejected: 'a' violates b") !=
          std::string::npos);
}

TEST_CASE("llm backend protocol") {
    auto t = std::make_shared<FakeTransport>();
    LlmSettings s;
    s.model = "test-model";

    SUBCASE("well-formed reply") {
        t->script = {reply(kGood)};
        LlmBackend b(t, s);
        const auto resp = b.generate(request());
        REQUIRE(resp.plans.size() == 1);
        CHECK(resp.plans[0].target_region == "2D");
        REQUIRE(t->requests.size() == 1);
        const auto& body = t->requests[0];
        CHECK(body["model"] == "test-model");
        CHECK(body["reasoning_effort"] == "high");
        CHECK(body["messages"][0]["role"] == "system");
        CHECK(body["messages"][0]["content"] == "SYSTEM DOC");
        CHECK(body["messages"][1]["role"] == "user");
    }
    SUBCASE("missing block triggers a corrective retry") {
        t->script = {reply("I think 2D is best."), reply(kGood)};
        LlmBackend b(t, s);
        CHECK(b.generate(request()).plans.size() == 1);
        REQUIRE(t->requests.size() == 2);
        const auto& msgs = t->requests[1]["messages"];
        REQUIRE(msgs.size() == 4);
        CHECK(msgs[2]["role"] == "assistant");
        CHECK(msgs[2]["content"] == "I think 2D is best.");
        CHECK(msgs[3]["content"].get<std::string>().find("no fenced ```json block") != std::string::npos);
    }
    SUBCASE("retries are bounded") {
        t->script = {reply("a"), reply("b"), reply("c"), reply("d"), reply(kGood)};
        LlmBackend b(t, s);
        CHECK_THROWS_AS(b.generate(request()), BackendError);
        CHECK(t->requests.size() == 4);
    }
    SUBCASE("malformed response bodies count as retries") {
        t->script = {"not json", R"({"choices": []})", reply(kGood)};
        LlmBackend b(t, s);
        CHECK(b.generate(request()).plans.size() == 1);
        CHECK(t->requests.size() == 3);
    }
    SUBCASE("effort is dropped when the endpoint rejects it") {
        t->script = {"!HTTP 400: Unsupported parameter: 'reasoning_effort'", reply(kGood), reply(kGood)};
        LlmBackend b(t, s);
        CHECK(b.generate(request()).plans.size() == 1);
        REQUIRE(t->requests.size() == 2);
        CHECK(t->requests[0].contains("reasoning_effort"));
        CHECK_FALSE(t->requests[1].contains("reasoning_effort"));
        b.generate(request());
        CHECK_FALSE(t->requests[2].contains("reasoning_effort"));
    }
    SUBCASE("effort can be disabled up front") {
        t->script = {reply(kGood)};
        s.send_effort = false;
        LlmBackend b(t, s);
        b.generate(request());
        CHECK_FALSE(t->requests[0].contains("reasoning_effort"));
    }
    SUBCASE("transport errors propagate") {
        t->script = {"!HTTP 401: bad key"};
        LlmBackend b(t, s);
        CHECK_THROWS_AS(b.generate(request()), BackendError);
    }
}

TEST_CASE("backend configuration from the environment") {
    ::unsetenv("CHICO_API_KEY");
    CHECK_THROWS_AS(LlmBackend::from_env(), BackendError);
    ::setenv("CHICO_API_KEY", "k", 1);
    ::unsetenv("CHICO_MODEL");
    CHECK_THROWS_AS(LlmBackend::from_env(), BackendError);
    ::setenv("CHICO_MODEL", "m", 1);
    CHECK(LlmBackend::from_env() != nullptr);
    ::unsetenv("CHICO_API_KEY");
    ::unsetenv("CHICO_MODEL");
}

TEST_CASE("unreachable endpoint fails fast") {
    // Nothing listens on port 9 of the loopback interface.
    HttpTransport t("http://127.0.0.1:9/v1", "k", 2);
    CHECK_THROWS_AS(t.post("{}"), BackendError);
}

TEST_CASE("heuristic backend with an empty best table falls back to coverage") {
    HeuristicBackend backend(chipdse::testing::full_space(), 3);
    auto req = request();
    req.plan_size = 2;
    auto iter1 = req;
    req.iteration = 4;
    req.best_configs = {"not a config"};
    const auto resp = backend.generate(req);
    CHECK(resp.plans.size() == 3);
    CHECK(resp.plans[0].rationale.rfind("broad coverage", 0) == 0);
    CHECK(backend.generate(iter1).plans.size() == 3);
}
