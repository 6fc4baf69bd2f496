#include "actbench/llm.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "actbench/http.hpp"

namespace actbench::llm {

using json = nlohmann::json;

CompletionResponse FunctionClient::complete(const CompletionRequest& request) {
  CompletionResponse r;
  r.text = handler_(request);
  r.usage.prompt = static_cast<int>((request.system.size() + request.user.size() + 3) / 4);
  r.usage.completion = static_cast<int>((r.text.size() + 3) / 4);
  return r;
}

std::string base64_encode(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

OpenAiCompatibleClient::OpenAiCompatibleClient(OpenAiConfig config) : config_(std::move(config)) {
  if (config_.model.empty()) throw ClientError("no model configured");
  if (config_.endpoint.empty()) throw ClientError("no endpoint configured");
}

std::string OpenAiCompatibleClient::request_body(const CompletionRequest& request) const {
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  if (request.image) {
    std::ifstream in(request.image->path, std::ios::binary);
    if (!in) throw ClientError("cannot read attachment " + request.image->path.string());
    std::ostringstream bytes;
    bytes << in.rdbuf();
    const std::string url = "data:" + request.image->mime + ";base64," + base64_encode(bytes.str());
    messages.push_back({{"role", "user"},
                        {"content",
                         {{{"type", "text"}, {"text", request.user}},
                          {{"type", "image_url"}, {"image_url", {{"url", url}}}}}}});
  } else {
    messages.push_back({{"role", "user"}, {"content", request.user}});
  }
  json body = {{"model", config_.model},
               {"messages", messages},
               {"temperature", request.decoding.temperature},
               {"top_p", request.decoding.top_p},
               {"max_tokens", request.decoding.max_tokens}};
  if (request.decoding.seed) body["seed"] = *request.decoding.seed;
  return body.dump();
}

CompletionResponse OpenAiCompatibleClient::parse_response(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw ClientError("response is not JSON");
  }
  CompletionResponse r;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    r.text = content.is_string() ? content.get<std::string>() : std::string();
  } catch (const json::exception&) {
    throw ClientError("response has no choices[0].message.content");
  }
  if (j.contains("usage") && j["usage"].is_object()) {
    r.usage.prompt = j["usage"].value("prompt_tokens", 0);
    r.usage.completion = j["usage"].value("completion_tokens", 0);
  }
  return r;
}

CompletionResponse OpenAiCompatibleClient::complete(const CompletionRequest& request) {
  const std::string body = request_body(request);
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << attempt));
    try {
      auto res = net::post(config_.endpoint + config_.path, body, "application/json", headers, config_.timeout);
      if (res.status >= 200 && res.status < 300) return parse_response(res.body);
      last_error = "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200);
      if (res.status != 429 && res.status < 500) break;
    } catch (const net::TransportError& e) {
      last_error = e.what();
    }
  }
  throw ClientError(last_error);
}

}  // namespace actbench::llm
