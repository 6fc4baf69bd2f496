#pragma once

// Command-line front end. Subcommands: validate, score, parse-screen, run,
// stats, make-fixture, import.
//
// Exit codes: 0 ok, 1 validation or scoring findings, 2 configuration or
// I/O error, 3 backend failure.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "actbench/dataset.hpp"
#include "actbench/harness.hpp"
#include "actbench/llm.hpp"
#include "actbench/screenparse.hpp"

namespace actbench::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kConfigOrIo = 2, kBackend = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Variables the CLI reads: ACTBENCH_API_KEY, ACTBENCH_ENDPOINT, ACTBENCH_MODEL.
struct Environment {
  std::map<std::string, std::string> vars;
  static Environment from_process();
  std::optional<std::string> get(const std::string& name) const;
};

// --- Backend configuration (JSON file, see docs/backend_protocol.md) --------------

struct LlmSettings {
  std::string type = "none";  // none | openai | mock-echo-gold | mock-garbage
  llm::OpenAiConfig openai;
};

struct EmbedderSettings {
  std::string type = "lexical";  // lexical | openai
  std::string endpoint = "https://api.openai.com";
  std::string path = "/v1/embeddings";
  std::string model;
  std::string api_key;
  int timeout_seconds = 60;
};

struct ScreenBackendSettings {
  std::string type;  // ocr: none | vocabulary | subprocess | http; segmenter: connected-components | subprocess | http
  std::vector<std::string> command;
  std::string url;
  std::vector<std::string> vocabulary;
  int timeout_seconds = 60;
};

struct ScreenparseSettings {
  ScreenBackendSettings ocr{"none"};
  ScreenBackendSettings segmenter{"connected-components"};
  std::string icons = "demo";  // demo | none | <directory>
  bool filter = false;         // filter elements with the configured LLM
  bool allow_fallback = true;
};

struct RunSettings {
  std::size_t token_budget = 4000;
  std::size_t shots = harness::kDefaultShots;
  std::size_t parallelism = 1;
  bool attach_image = false;
  std::string elements = "screenparse";  // screenparse | boxes | none
};

struct BackendConfig {
  LlmSettings llm;
  llm::DecodingParams decoding;
  EmbedderSettings embedder;
  ScreenparseSettings screenparse;
  RunSettings run;
};

// Unknown keys and wrongly typed values throw ConfigError. Environment
// variables override file values.
BackendConfig parse_backend_config(const std::string& json_text, const Environment& env);
BackendConfig load_backend_config(const std::optional<std::filesystem::path>& path, const Environment& env);

// Null for type "none". Mock clients need the dataset.
std::unique_ptr<llm::CompletionClient> make_client(const LlmSettings& settings, const dataset::Dataset* dataset);
std::unique_ptr<harness::Embedder> make_embedder(const EmbedderSettings& settings);

// Backends referenced by a PipelineConfig, kept alive together.
struct ScreenBackends {
  std::unique_ptr<screenparse::OcrBackend> ocr;
  std::unique_ptr<screenparse::SegmentationBackend> segmenter;
  screenparse::IconLibrary icons;
  std::unique_ptr<llm::CompletionClient> filter;
  screenparse::SegmentOptions segment;
  screenparse::PipelineConfig pipeline() const;
};

ScreenBackends make_screen_backends(const BackendConfig& config, bool use_filter);

// --- Outputs -----------------------------------------------------------------------------

// Predictions file: one {"task_id", "script"} object per line; "script" may
// be null. Later lines for a task replace earlier ones.
std::map<std::string, harness::PredictionRecord> read_predictions(const std::filesystem::path& path);

nlohmann::json screen_parse_to_json(const screenparse::ScreenParse& parse);

// Two-panel bar chart (tasks per platform and split, action shares).
void write_stats_plot(const dataset::DatasetStats& stats, const std::filesystem::path& png);

// --- Entry point ----------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = Environment::from_process());

}  // namespace actbench::cli
