#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "actbench/bleu.hpp"
#include "actbench/harness.hpp"
#include "actbench/http.hpp"

namespace actbench::harness {

using json = nlohmann::json;

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double lexical_similarity(std::string_view a, std::string_view b) {
  const auto ta = metrics::tokenize(a);
  const auto tb = metrics::tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return double(common) / double(sa.size() + sb.size() - common);
}

OpenAiEmbedder::OpenAiEmbedder(std::string endpoint, std::string model, std::string api_key, std::string path,
                               int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      path_(std::move(path)),
      timeout_seconds_(timeout_seconds) {}

std::vector<double> OpenAiEmbedder::embed(const std::string& text) {
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  net::HttpResponse res;
  try {
    res = net::post(endpoint_ + path_, json{{"model", model_}, {"input", text}}.dump(), "application/json", headers,
                    std::chrono::seconds(timeout_seconds_));
  } catch (const net::TransportError& e) {
    throw EmbedderUnavailable(e.what());
  }
  if (res.status < 200 || res.status >= 300) throw EmbedderUnavailable("embeddings: HTTP " + std::to_string(res.status));
  try {
    return json::parse(res.body).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw EmbedderUnavailable("embeddings: unexpected response");
  }
}

ShotSelection select_shots(const std::string& task_text, const std::vector<Shot>& pool, std::size_t k,
                           Embedder* embedder) {
  ShotSelection out;
  std::vector<Shot> ranked = pool;

  bool scored = false;
  if (embedder != nullptr) {
    try {
      const auto query = embedder->embed(task_text);
      for (auto& shot : ranked) shot.similarity = cosine(query, embedder->embed(shot.task_text));
      scored = true;
    } catch (const EmbedderUnavailable& e) {
      out.warnings.push_back(std::string("embedder unavailable (") + e.what() + "); using lexical overlap");
    }
  }
  if (!scored)
    for (auto& shot : ranked) shot.similarity = lexical_similarity(task_text, shot.task_text);

  std::sort(ranked.begin(), ranked.end(), [](const Shot& a, const Shot& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.task_id < b.task_id;
  });
  ranked.resize(std::min(k, ranked.size()));
  out.shots = std::move(ranked);
  return out;
}

}  // namespace actbench::harness
