#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "lexalign/errors.hpp"
#include "lexalign/json.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  int sample_index = 0;  // distinguishes repeated samples of one prompt
  std::string model_id;
};

// Deterministic content key: two requests collide iff all four fields match.
inline std::string request_fingerprint(const CompletionRequest& req) {
  std::string canon = req.model_id;
  canon += '\x1f';
  canon += util::format_double(req.temperature);
  canon += '\x1f';
  canon += std::to_string(req.sample_index);
  canon += '\x1f';
  canon += req.prompt;
  return util::fnv1a_hex(canon);
}

struct CompletionResult {
  std::string text;
  std::string request_fingerprint;
  std::string timestamp;
};

// Raw completion source: live HTTP backend, transcript mock, or a test fake.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual CompletionResult complete(const CompletionRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Replays a recorded transcript; fully deterministic, no network activity.
class MockProvider : public ChatProvider {
 public:
  static constexpr int kTranscriptSchemaVersion = 1;

  explicit MockProvider(std::map<std::string, std::string> by_fingerprint)
      : responses_(std::move(by_fingerprint)) {}

  static std::shared_ptr<MockProvider> from_transcript(const std::filesystem::path& path) {
    jsonx::Json j = jsonx::parse<MalformedTranscript>(util::read_file(path), "transcript");
    jsonx::require_schema_version<MalformedTranscript>(j, kTranscriptSchemaVersion, "transcript");
    const auto& entries = jsonx::require_array<MalformedTranscript>(j, "entries", "transcript");
    std::map<std::string, std::string> responses;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      std::string path_i = "transcript.entries[" + std::to_string(i) + "]";
      CompletionRequest req;
      req.prompt = jsonx::require_string<MalformedTranscript>(entries[i], "prompt", path_i);
      req.temperature = jsonx::require_number<MalformedTranscript>(entries[i], "temperature", path_i);
      req.sample_index =
          static_cast<int>(jsonx::require_int<MalformedTranscript>(entries[i], "sample_index", path_i));
      req.model_id = jsonx::require_string<MalformedTranscript>(entries[i], "model_id", path_i);
      std::string text =
          jsonx::require_string<MalformedTranscript>(entries[i], "response_text", path_i);
      responses[request_fingerprint(req)] = std::move(text);
    }
    return std::make_shared<MockProvider>(std::move(responses));
  }

  CompletionResult complete(const CompletionRequest& req) override {
    std::string fp = request_fingerprint(req);
    auto it = responses_.find(fp);
    if (it == responses_.end())
      throw MissingFingerprint("transcript has no entry for fingerprint " + fp + " (model=" +
                               req.model_id + ", sample_index=" +
                               std::to_string(req.sample_index) + ")");
    return {it->second, fp, "1970-01-01T00:00:00Z"};
  }

  std::string name() const override { return "mock"; }
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

// Bounds concurrent provider calls; permits release on scope exit.
class RateLimiter {
 public:
  explicit RateLimiter(int max_in_flight) : available_(max_in_flight) {}

  class Permit {
   public:
    explicit Permit(RateLimiter* limiter) : limiter_(limiter) {}
    Permit(Permit&& other) noexcept : limiter_(other.limiter_) { other.limiter_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() {
      if (limiter_) limiter_->release();
    }

   private:
    RateLimiter* limiter_;
  };

  Permit acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
    return Permit(this);
  }

 private:
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

struct ClientOptions {
  std::filesystem::path cache_dir;  // empty: in-memory cache only
  int max_in_flight = 4;
  long max_calls = 0;  // provider-call budget; 0 = unlimited
  int max_samples = 5;
  int retry_attempts = 3;  // retries after the initial call
  std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(1000),
                                                    std::chrono::milliseconds(4000),
                                                    std::chrono::milliseconds(16000)};
  std::function<void(std::chrono::milliseconds)> sleep_fn =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

inline constexpr int kCacheRecordSchemaVersion = 1;

// Provider-agnostic client. Serves repeats from the fingerprint cache,
// retries transient provider failures with bounded backoff, enforces the
// call budget and the in-flight cap. Safe to call from many workers.
class Client {
 public:
  Client(std::shared_ptr<ChatProvider> provider, ClientOptions options)
      : provider_(std::move(provider)),
        options_(std::move(options)),
        limiter_(options_.max_in_flight) {
    if (!options_.cache_dir.empty()) std::filesystem::create_directories(options_.cache_dir);
  }

  CompletionResult complete(const CompletionRequest& req) {
    validate(req);
    std::string fp = request_fingerprint(req);

    std::unique_lock lock(mutex_);
    for (;;) {
      auto mem = memory_cache_.find(fp);
      if (mem != memory_cache_.end()) {
        ++cache_hits_;
        return mem->second;
      }
      if (!options_.cache_dir.empty()) {
        if (auto disk = read_cache_record(fp)) {
          ++cache_hits_;
          memory_cache_[fp] = *disk;
          return *disk;
        }
      }
      if (!in_progress_.contains(fp)) break;
      // Another worker is fetching this fingerprint; wait for it.
      progress_cv_.wait(lock);
    }
    in_progress_.insert(fp);
    lock.unlock();

    try {
      CompletionResult result = fetch_with_retry(req, fp);
      lock.lock();
      memory_cache_[fp] = result;
      if (!options_.cache_dir.empty()) write_cache_record(req, result);
      in_progress_.erase(fp);
      lock.unlock();
      progress_cv_.notify_all();
      return result;
    } catch (...) {
      lock.lock();
      in_progress_.erase(fp);
      lock.unlock();
      progress_cv_.notify_all();
      throw;
    }
  }

  long provider_calls() const {
    std::lock_guard lock(mutex_);
    return provider_calls_;
  }
  long cache_hits() const {
    std::lock_guard lock(mutex_);
    return cache_hits_;
  }
  const ClientOptions& options() const { return options_; }

 private:
  void validate(const CompletionRequest& req) const {
    if (req.prompt.empty()) throw InvalidRequest("request prompt is empty");
    if (req.temperature < 0) throw InvalidRequest("temperature must be >= 0");
    if (req.sample_index < 0) throw InvalidRequest("sample_index must be >= 0");
    if (req.sample_index >= options_.max_samples)
      throw InvalidRequest("sample_index " + std::to_string(req.sample_index) +
                           " >= configured max samples " + std::to_string(options_.max_samples));
    if (req.model_id.empty()) throw InvalidRequest("model_id is empty");
  }

  CompletionResult fetch_with_retry(const CompletionRequest& req, const std::string& fp) {
    for (int attempt = 0;; ++attempt) {
      try {
        {
          std::lock_guard lock(mutex_);
          if (options_.max_calls > 0 && provider_calls_ >= options_.max_calls)
            throw BudgetExceeded("provider call budget of " +
                                 std::to_string(options_.max_calls) + " reached");
          ++provider_calls_;
        }
        RateLimiter::Permit permit = limiter_.acquire();
        CompletionResult result = provider_->complete(req);
        result.request_fingerprint = fp;
        return result;
      } catch (const ProviderError&) {
        if (attempt >= options_.retry_attempts) throw;
        auto wait = attempt < static_cast<int>(options_.backoff.size())
                        ? options_.backoff[attempt]
                        : options_.backoff.back();
        options_.sleep_fn(wait);
      }
    }
  }

  std::optional<CompletionResult> read_cache_record(const std::string& fp) const {
    std::filesystem::path file = options_.cache_dir / (fp + ".json");
    if (!std::filesystem::exists(file)) return std::nullopt;
    jsonx::Json j = jsonx::parse<Error>(util::read_file(file), "cache record " + fp);
    CompletionResult result;
    result.text = jsonx::require_string<Error>(j, "response_text", "cache");
    result.request_fingerprint = fp;
    result.timestamp = jsonx::require_string<Error>(j, "timestamp", "cache");
    return result;
  }

  void write_cache_record(const CompletionRequest& req, const CompletionResult& result) const {
    jsonx::Json j;
    j["schema_version"] = kCacheRecordSchemaVersion;
    j["model_id"] = req.model_id;
    j["temperature"] = req.temperature;
    j["sample_index"] = req.sample_index;
    j["prompt"] = req.prompt;
    j["response_text"] = result.text;
    j["timestamp"] = result.timestamp;
    util::write_file(options_.cache_dir / (result.request_fingerprint + ".json"), j.dump(2));
  }

  std::shared_ptr<ChatProvider> provider_;
  ClientOptions options_;
  RateLimiter limiter_;

  mutable std::mutex mutex_;
  std::condition_variable progress_cv_;
  std::map<std::string, CompletionResult> memory_cache_;
  std::set<std::string> in_progress_;
  long provider_calls_ = 0;
  long cache_hits_ = 0;
};

inline std::shared_ptr<Client> mock_from_transcript(const std::filesystem::path& path,
                                                    ClientOptions options = {}) {
  return std::make_shared<Client>(MockProvider::from_transcript(path), std::move(options));
}

}  // namespace lexalign
