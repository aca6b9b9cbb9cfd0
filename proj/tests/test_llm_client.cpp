#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

#include "lexalign/llm_client.hpp"

using namespace lexalign;
namespace fs = std::filesystem;

namespace {

CompletionRequest request(const std::string& prompt, int sample = 0, double temp = 1.0) {
  CompletionRequest req;
  req.prompt = prompt;
  req.temperature = temp;
  req.sample_index = sample;
  req.model_id = "test-model";
  return req;
}

// Provider that counts calls and can fail the first N of them.
class ScriptedProvider : public ChatProvider {
 public:
  explicit ScriptedProvider(int fail_first = 0, std::chrono::milliseconds delay = {})
      : fail_first_(fail_first), delay_(delay) {}

  CompletionResult complete(const CompletionRequest& req) override {
    int n = ++calls_;
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    if (n <= fail_first_) throw ProviderError("transient failure " + std::to_string(n));
    return {"echo: " + req.prompt, request_fingerprint(req), "1970-01-01T00:00:00Z"};
  }

  std::string name() const override { return "scripted"; }
  int calls() const { return calls_.load(); }

 private:
  std::atomic<int> calls_{0};
  int fail_first_;
  std::chrono::milliseconds delay_;
};

ClientOptions no_sleep_options() {
  ClientOptions options;
  options.sleep_fn = [](std::chrono::milliseconds) {};
  return options;
}

}  // namespace

TEST_CASE("fingerprints separate every request dimension", "[client]") {
  std::string base = request_fingerprint(request("p"));
  CHECK(base == request_fingerprint(request("p")));
  CHECK(base != request_fingerprint(request("q")));
  CHECK(base != request_fingerprint(request("p", 1)));
  CHECK(base != request_fingerprint(request("p", 0, 0.5)));
  CompletionRequest other = request("p");
  other.model_id = "other-model";
  CHECK(base != request_fingerprint(other));
}

TEST_CASE("mock provider replays the transcript and rejects strangers", "[client]") {
  auto tmp = fs::temp_directory_path() / "lexalign_transcript_test.json";
  jsonx::Json t;
  t["schema_version"] = MockProvider::kTranscriptSchemaVersion;
  t["entries"] = jsonx::Json::array();
  CompletionRequest req = request("known prompt", 2, 0.7);
  t["entries"].push_back({{"prompt", req.prompt},
                          {"temperature", req.temperature},
                          {"sample_index", req.sample_index},
                          {"model_id", req.model_id},
                          {"response_text", "the reply"}});
  util::write_file(tmp, t.dump());

  auto provider = MockProvider::from_transcript(tmp);
  CHECK(provider->complete(req).text == "the reply");
  CHECK_THROWS_AS(provider->complete(request("unknown")), MissingFingerprint);
  fs::remove(tmp);
}

TEST_CASE("identical requests hit the memory cache", "[client]") {
  auto provider = std::make_shared<ScriptedProvider>();
  Client client(provider, no_sleep_options());
  CompletionRequest req = request("cache me");
  CHECK(client.complete(req).text == "echo: cache me");
  CHECK(client.complete(req).text == "echo: cache me");
  CHECK(provider->calls() == 1);
  CHECK(client.provider_calls() == 1);
  CHECK(client.cache_hits() == 1);
}

TEST_CASE("the disk cache survives a new client", "[client]") {
  auto dir = fs::temp_directory_path() / "lexalign_cache_test";
  fs::remove_all(dir);
  ClientOptions options = no_sleep_options();
  options.cache_dir = dir;

  auto provider = std::make_shared<ScriptedProvider>();
  {
    Client client(provider, options);
    client.complete(request("persist me"));
  }
  CHECK(provider->calls() == 1);

  auto fresh_provider = std::make_shared<ScriptedProvider>();
  Client warm(fresh_provider, options);
  CHECK(warm.complete(request("persist me")).text == "echo: persist me");
  CHECK(fresh_provider->calls() == 0);
  CHECK(warm.provider_calls() == 0);
  fs::remove_all(dir);
}

TEST_CASE("transient provider errors retry with the fixed backoff ladder", "[client]") {
  std::vector<long> sleeps;
  ClientOptions options;
  options.sleep_fn = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };

  auto provider = std::make_shared<ScriptedProvider>(2);
  Client client(provider, options);
  CHECK(client.complete(request("retry me")).text == "echo: retry me");
  CHECK(provider->calls() == 3);
  CHECK(sleeps == std::vector<long>({1000, 4000}));
}

TEST_CASE("a provider that never recovers exhausts the retries", "[client]") {
  std::vector<long> sleeps;
  ClientOptions options;
  options.sleep_fn = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };

  auto provider = std::make_shared<ScriptedProvider>(1000);
  Client client(provider, options);
  CHECK_THROWS_AS(client.complete(request("doomed")), ProviderError);
  CHECK(provider->calls() == 4);  // initial call + 3 retries
  CHECK(sleeps == std::vector<long>({1000, 4000, 16000}));
}

TEST_CASE("the call budget is enforced", "[client]") {
  ClientOptions options = no_sleep_options();
  options.max_calls = 2;
  Client client(std::make_shared<ScriptedProvider>(), options);
  client.complete(request("one"));
  client.complete(request("two"));
  client.complete(request("one"));  // cache hit, no budget spent
  CHECK_THROWS_AS(client.complete(request("three")), BudgetExceeded);
}

TEST_CASE("invalid requests are rejected before any call", "[client]") {
  auto provider = std::make_shared<ScriptedProvider>();
  Client client(provider, no_sleep_options());
  CHECK_THROWS_AS(client.complete(request("")), InvalidRequest);
  CHECK_THROWS_AS(client.complete(request("p", 0, -0.1)), InvalidRequest);
  CHECK_THROWS_AS(client.complete(request("p", 5)), InvalidRequest);  // max_samples = 5
  CompletionRequest no_model = request("p");
  no_model.model_id.clear();
  CHECK_THROWS_AS(client.complete(no_model), InvalidRequest);
  CHECK(provider->calls() == 0);
}

TEST_CASE("concurrent identical requests collapse onto one provider call", "[client]") {
  auto provider = std::make_shared<ScriptedProvider>(0, std::chrono::milliseconds(30));
  Client client(provider, no_sleep_options());
  std::vector<std::thread> workers;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&] {
      if (client.complete(request("same")).text == "echo: same") ++ok;
    });
  }
  for (auto& w : workers) w.join();
  CHECK(ok == 8);
  CHECK(provider->calls() == 1);
}

TEST_CASE("distinct concurrent requests respect max_in_flight", "[client]") {
  auto provider = std::make_shared<ScriptedProvider>(0, std::chrono::milliseconds(10));
  ClientOptions options = no_sleep_options();
  options.max_in_flight = 2;
  options.max_samples = 100;
  Client client(provider, options);
  std::vector<std::thread> workers;
  for (int i = 0; i < 6; ++i)
    workers.emplace_back([&, i] { client.complete(request("p", i)); });
  for (auto& w : workers) w.join();
  CHECK(provider->calls() == 6);
}
