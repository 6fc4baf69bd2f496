#pragma once

// Provider-agnostic completion interface shared by the screen-element filter
// and the baseline harness.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace actbench::llm {

struct Attachment {
  std::filesystem::path path;  // passed by reference; clients read it if they need bytes
  std::string mime = "image/png";
};

struct DecodingParams {
  double temperature = 0.0;
  int max_tokens = 512;
  double top_p = 1.0;
  std::optional<std::uint64_t> seed;
};

struct CompletionRequest {
  std::string system;
  std::string user;
  std::optional<Attachment> image;
  DecodingParams decoding;
  std::string task_id;  // metadata only, never sent to a provider
};

struct TokenUsage {
  int prompt = 0;
  int completion = 0;
};

struct CompletionResponse {
  std::string text;
  TokenUsage usage;
};

class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Must be safe to call from several threads at once.
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Answers with a user-supplied function. Handy for tests and offline runs.
class FunctionClient : public CompletionClient {
 public:
  using Handler = std::function<std::string(const CompletionRequest&)>;
  FunctionClient(std::string id, Handler handler) : id_(std::move(id)), handler_(std::move(handler)) {}
  CompletionResponse complete(const CompletionRequest& request) override;
  std::string id() const override { return id_; }

 private:
  std::string id_;
  Handler handler_;
};

struct OpenAiConfig {
  std::string endpoint = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
  int max_retries = 2;  // on transport errors, 429 and 5xx
};

// Chat-completions client for any OpenAI-compatible server.
class OpenAiCompatibleClient : public CompletionClient {
 public:
  explicit OpenAiCompatibleClient(OpenAiConfig config);
  CompletionResponse complete(const CompletionRequest& request) override;
  std::string id() const override { return "openai:" + config_.model; }

  // Exposed for tests: the JSON body sent for a request.
  std::string request_body(const CompletionRequest& request) const;
  static CompletionResponse parse_response(const std::string& body);

 private:
  OpenAiConfig config_;
};

std::string base64_encode(const std::string& bytes);

}  // namespace actbench::llm
