#include <catch_amalgamated.hpp>

#include <httplib.h>

#include <thread>

#include "helpers.hpp"
#include "intentforge/error.hpp"
#include "intentforge/llm.hpp"

using namespace intentforge;
using namespace intentforge::llm;

namespace {

struct StubServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
    ~StubServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
};

}  // namespace

TEST_CASE("sha256_hex known vectors", "[llm]") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("request_hash covers system and user only", "[llm]") {
    CompletionRequest a{std::nullopt, "hello", 0.0, "m1", std::nullopt};
    CompletionRequest b{std::nullopt, "hello", 0.7, "m2", 100};
    CompletionRequest c{std::string("sys"), "hello", 0.0, "m1", std::nullopt};
    CHECK(request_hash(a) == request_hash(b));
    CHECK(request_hash(a) != request_hash(c));
    CHECK(request_hash(a) == sha256_hex(R"({"system":null,"user":"hello"})"));
}

TEST_CASE("ReplayProvider", "[llm][replay]") {
    CompletionRequest p{std::nullopt, "write a test", 0.0, "", std::nullopt};
    SECTION("in-memory hit and miss") {
        ReplayProvider replay(std::map<std::string, std::string>{{request_hash(p), "```package a;```"}});
        CHECK(replay.complete(p) == "```package a;```");
        CompletionRequest other{std::nullopt, "something else", 0.0, "", std::nullopt};
        try {
            replay.complete(other);
            FAIL("expected a replay miss");
        } catch (const ReplayMissError& e) {
            CHECK(std::string(e.what()).find(request_hash(other)) != std::string::npos);
        }
    }
    SECTION("directory store written by the recorder") {
        struct Fixed : CompletionProvider {
            int calls = 0;
            std::string id() const override { return "fixed"; }
            std::string complete(const CompletionRequest&) override {
                ++calls;
                return "recorded";
            }
        };
        auto dir = testing::scratch_dir("replay");
        auto inner = std::make_shared<Fixed>();
        RecordingProvider recorder(inner, dir);
        CHECK(recorder.complete(p) == "recorded");
        CHECK(std::filesystem::exists(dir / (request_hash(p) + ".json")));
        ReplayProvider replay(dir);
        CHECK(replay.complete(p) == "recorded");
        CHECK(replay.complete(p) == "recorded");
        CHECK(inner->calls == 1);
        CHECK_THROWS_AS(replay.complete({std::nullopt, "miss", 0.0, "", std::nullopt}), ReplayMissError);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("extract_response follows dotted paths", "[llm]") {
    auto reply = nlohmann::json::parse(R"({"choices":[{"message":{"content":"hi"}}],"out":{"text":"t"}})");
    CHECK(extract_response(reply, "choices.0.message.content") == "hi");
    CHECK(extract_response(reply, "out.text") == "t");
    CHECK_THROWS_AS(extract_response(reply, "choices.1.message.content"), ProviderError);
    CHECK_THROWS_AS(extract_response(reply, "out"), ProviderError);
}

TEST_CASE("HttpProvider against a local stub", "[llm][http]") {
    StubServer stub;
    nlohmann::json seen;
    std::string seen_auth;
    int flaky_calls = 0;
    stub.server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        seen_auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"fixed body"}}]})", "application/json");
    });
    stub.server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++flaky_calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"choices":[{"message":{"content":"after retries"}}]})", "application/json");
    });
    stub.server.Post("/denied", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    stub.start();

    ::setenv("INTENTFORGE_TEST_LLM_KEY", "secret", 1);
    HttpProviderConfig cfg;
    cfg.endpoint = stub.url("/v1/chat");
    cfg.api_key_env = "INTENTFORGE_TEST_LLM_KEY";
    cfg.backoff_seconds = 0.01;
    HttpProvider provider(cfg);
    CompletionRequest req{std::string("be brief"), "write a test", 0.0, "model-x", std::nullopt};
    CHECK(provider.complete(req) == "fixed body");
    CHECK(seen["model"] == "model-x");
    CHECK(seen["temperature"] == 0.0);
    CHECK(seen["messages"] == nlohmann::json::parse(
                                  R"([{"role":"system","content":"be brief"},{"role":"user","content":"write a test"}])"));
    CHECK(seen_auth == "Bearer secret");

    cfg.endpoint = stub.url("/flaky");
    CHECK(HttpProvider(cfg).complete(req) == "after retries");
    CHECK(flaky_calls == 3);

    cfg.endpoint = stub.url("/denied");
    CHECK_THROWS_AS(HttpProvider(cfg).complete(req), ProviderError);

    cfg.endpoint = stub.url("/v1/chat");
    cfg.api_key_env = "INTENTFORGE_TEST_UNSET_KEY_VAR";
    CHECK_THROWS_AS(HttpProvider(cfg).complete(req), ProviderError);
}
