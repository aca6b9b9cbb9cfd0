#pragma once

// Live OpenAI-style chat backend. Pulled in only by the CLI so the library
// and tests stay free of the httplib dependency.

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>

#include "lexalign/errors.hpp"
#include "lexalign/json.hpp"
#include "lexalign/llm_client.hpp"

namespace lexalign {

inline constexpr const char* kApiKeyEnvVar = "LEXALIGN_API_KEY";

// Reads the provider key from $LEXALIGN_API_KEY. The value is used for the
// Authorization header only and must never appear in logs or artifacts.
inline std::string api_key_from_env() {
  const char* value = std::getenv(kApiKeyEnvVar);
  if (value == nullptr || *value == '\0')
    throw ProviderError(std::string(kApiKeyEnvVar) + " is not set");
  return value;
}

class HttpProvider : public ChatProvider {
 public:
  HttpProvider(std::string base_url, std::string api_key,
               std::string path = "/v1/chat/completions")
      : base_url_(std::move(base_url)), api_key_(std::move(api_key)), path_(std::move(path)) {}

  CompletionResult complete(const CompletionRequest& req) override {
    jsonx::Json body;
    body["model"] = req.model_id;
    body["temperature"] = req.temperature;
    body["messages"] = jsonx::Json::array({{{"role", "user"}, {"content", req.prompt}}});

    httplib::Client http(base_url_);
    http.set_read_timeout(120, 0);
    http.set_bearer_token_auth(api_key_);
    auto res = http.Post(path_, body.dump(), "application/json");
    if (!res) throw ProviderError("transport failure: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ProviderError("provider returned HTTP " + std::to_string(res->status));

    jsonx::Json j = jsonx::parse<ProviderError>(res->body, "provider response");
    const auto& choices = jsonx::require_array<ProviderError>(j, "choices", "provider response");
    if (choices.empty()) throw ProviderError("provider response has no choices");
    const auto& message =
        jsonx::require<ProviderError>(choices[0], "message", "provider response.choices[0]");
    CompletionResult result;
    result.text = jsonx::require_string<ProviderError>(message, "content",
                                                       "provider response.choices[0].message");
    result.request_fingerprint = request_fingerprint(req);
    result.timestamp = util::iso_timestamp_utc();
    return result;
  }

  std::string name() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
  std::string path_;
};

}  // namespace lexalign
