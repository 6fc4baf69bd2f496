#include <cstdlib>
#include <fstream>
#include <set>

#include "actbench/cli.hpp"

extern char** environ;

namespace actbench::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

Environment Environment::from_process() {
  Environment env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string_view kv(*e);
    if (!kv.starts_with("ACTBENCH_")) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.vars.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return env;
}

std::optional<std::string> Environment::get(const std::string& name) const {
  auto it = vars.find(name);
  if (it == vars.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

namespace {

// Reads known keys from an object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError(where_ + ": unknown key \"" + key + "\"");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "/" + key + ": wrong type");
    }
  }
  // Calls fn(Section&) when the key is present.
  template <typename Fn>
  void sub(const char* key, Fn fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Section s(j_.at(key), where_ + "/" + key);
    fn(s);
    s.finish();
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_screen_backend(Section& s, ScreenBackendSettings& out) {
  s.get("type", out.type);
  s.get("command", out.command);
  s.get("url", out.url);
  s.get("vocabulary", out.vocabulary);
  s.get("timeout_seconds", out.timeout_seconds);
}

void check_choice(const std::string& what, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(what + ": \"" + value + "\" is not one of " + list);
}

}  // namespace

BackendConfig parse_backend_config(const std::string& text, const Environment& env) {
  BackendConfig c;
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("backend config is not valid JSON: ") + e.what());
  }
  Section root(j, "");
  root.sub("llm", [&](Section& s) {
    s.get("type", c.llm.type);
    s.get("endpoint", c.llm.openai.endpoint);
    s.get("path", c.llm.openai.path);
    s.get("model", c.llm.openai.model);
    s.get("api_key", c.llm.openai.api_key);
    int timeout = static_cast<int>(c.llm.openai.timeout.count());
    s.get("timeout_seconds", timeout);
    c.llm.openai.timeout = std::chrono::seconds(timeout);
    s.get("max_retries", c.llm.openai.max_retries);
  });
  root.sub("decoding", [&](Section& s) {
    s.get("temperature", c.decoding.temperature);
    s.get("max_tokens", c.decoding.max_tokens);
    s.get("top_p", c.decoding.top_p);
    if (s.has("seed")) {
      std::uint64_t seed = 0;
      s.get("seed", seed);
      c.decoding.seed = seed;
    }
  });
  root.sub("embedder", [&](Section& s) {
    s.get("type", c.embedder.type);
    s.get("endpoint", c.embedder.endpoint);
    s.get("path", c.embedder.path);
    s.get("model", c.embedder.model);
    s.get("api_key", c.embedder.api_key);
    s.get("timeout_seconds", c.embedder.timeout_seconds);
  });
  root.sub("screenparse", [&](Section& s) {
    s.sub("ocr", [&](Section& o) { read_screen_backend(o, c.screenparse.ocr); });
    s.sub("segmenter", [&](Section& o) { read_screen_backend(o, c.screenparse.segmenter); });
    s.get("icons", c.screenparse.icons);
    s.get("filter", c.screenparse.filter);
    s.get("allow_fallback", c.screenparse.allow_fallback);
  });
  root.sub("run", [&](Section& s) {
    s.get("token_budget", c.run.token_budget);
    s.get("shots", c.run.shots);
    s.get("parallelism", c.run.parallelism);
    s.get("attach_image", c.run.attach_image);
    s.get("elements", c.run.elements);
  });
  root.finish();

  if (auto v = env.get("ACTBENCH_ENDPOINT")) c.llm.openai.endpoint = *v;
  if (auto v = env.get("ACTBENCH_MODEL")) c.llm.openai.model = *v;
  if (auto v = env.get("ACTBENCH_API_KEY")) {
    c.llm.openai.api_key = *v;
    if (c.embedder.api_key.empty()) c.embedder.api_key = *v;
  }
  if (c.llm.type == "none" && env.get("ACTBENCH_MODEL")) c.llm.type = "openai";

  check_choice("llm.type", c.llm.type, {"none", "openai", "mock-echo-gold", "mock-garbage"});
  check_choice("embedder.type", c.embedder.type, {"lexical", "openai"});
  check_choice("screenparse.ocr.type", c.screenparse.ocr.type, {"none", "vocabulary", "subprocess", "http"});
  check_choice("screenparse.segmenter.type", c.screenparse.segmenter.type,
               {"connected-components", "subprocess", "http"});
  check_choice("run.elements", c.run.elements, {"screenparse", "boxes", "none"});
  if (c.llm.type == "openai" && c.llm.openai.model.empty()) throw ConfigError("llm.model is required for openai");
  if (c.embedder.type == "openai" && c.embedder.model.empty())
    throw ConfigError("embedder.model is required for openai");
  for (const auto* b : {&c.screenparse.ocr, &c.screenparse.segmenter}) {
    if (b->type == "subprocess" && b->command.empty()) throw ConfigError("subprocess backend needs a command");
    if (b->type == "http" && b->url.empty()) throw ConfigError("http backend needs a url");
  }
  if (c.run.token_budget == 0) throw ConfigError("run.token_budget must be positive");
  if (c.run.parallelism == 0) throw ConfigError("run.parallelism must be at least 1");
  return c;
}

BackendConfig load_backend_config(const std::optional<fs::path>& path, const Environment& env) {
  if (!path) return parse_backend_config("", env);
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ConfigError("cannot read backend config " + path->string());
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  try {
    return parse_backend_config(text, env);
  } catch (const ConfigError& e) {
    throw ConfigError(path->string() + ": " + e.what());
  }
}

std::unique_ptr<llm::CompletionClient> make_client(const LlmSettings& settings, const dataset::Dataset* ds) {
  if (settings.type == "openai") return std::make_unique<llm::OpenAiCompatibleClient>(settings.openai);
  if (settings.type == "mock-garbage") return harness::make_garbage_client();
  if (settings.type == "mock-echo-gold") {
    if (ds == nullptr) throw ConfigError("mock-echo-gold needs a dataset");
    return harness::make_echo_gold_client(*ds);
  }
  return nullptr;
}

std::unique_ptr<harness::Embedder> make_embedder(const EmbedderSettings& s) {
  if (s.type != "openai") return nullptr;
  return std::make_unique<harness::OpenAiEmbedder>(s.endpoint, s.model, s.api_key, s.path, s.timeout_seconds);
}

screenparse::PipelineConfig ScreenBackends::pipeline() const {
  screenparse::PipelineConfig p;
  p.ocr = ocr.get();
  p.segmenter = segmenter.get();
  p.icons = icons.empty() ? nullptr : &icons;
  p.filter = filter.get();
  p.segment = segment;
  return p;
}

ScreenBackends make_screen_backends(const BackendConfig& config, bool use_filter) {
  const auto& sp = config.screenparse;
  ScreenBackends b;
  b.segment.allow_fallback = sp.allow_fallback;
  if (sp.ocr.type == "vocabulary")
    b.ocr = std::make_unique<screenparse::VocabularyOcrBackend>(sp.ocr.vocabulary);
  else if (sp.ocr.type == "subprocess")
    b.ocr = std::make_unique<screenparse::SubprocessBackend>(sp.ocr.command);
  else if (sp.ocr.type == "http")
    b.ocr = std::make_unique<screenparse::HttpBackend>(sp.ocr.url, sp.ocr.timeout_seconds);

  if (sp.segmenter.type == "subprocess")
    b.segmenter = std::make_unique<screenparse::SubprocessBackend>(sp.segmenter.command);
  else if (sp.segmenter.type == "http")
    b.segmenter = std::make_unique<screenparse::HttpBackend>(sp.segmenter.url, sp.segmenter.timeout_seconds);
  else
    b.segmenter = std::make_unique<screenparse::ConnectedComponentSegmenter>(
        screenparse::ConnectedComponentSegmenter::Options{});

  if (sp.icons == "demo") {
    b.icons = screenparse::demo_icon_library();
  } else if (sp.icons != "none") {
    if (!fs::is_directory(sp.icons)) throw ConfigError("icon library " + sp.icons + " is not a directory");
    b.icons = screenparse::load_icon_library(sp.icons);
  }

  if (use_filter && sp.filter) {
    b.filter = make_client(config.llm, nullptr);
    if (!b.filter) throw ConfigError("screenparse.filter needs an llm backend");
  }
  return b;
}

}  // namespace actbench::cli
