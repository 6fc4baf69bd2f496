#pragma once

// Few-shot baseline runner: shot retrieval, prompt assembly under a token
// budget, completion, script extraction, journaling and scoring.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "actbench/dataset.hpp"
#include "actbench/llm.hpp"
#include "actbench/metrics.hpp"
#include "actbench/screenparse.hpp"

namespace actbench::harness {

using screenparse::UIElement;

// --- Embeddings and shot selection ---------------------------------------------

class EmbedderUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
  virtual std::string name() const = 0;
};

class FunctionEmbedder : public Embedder {
 public:
  using Fn = std::function<std::vector<double>(const std::string&)>;
  FunctionEmbedder(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::vector<double> embed(const std::string& text) override { return fn_(text); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

// POST <endpoint><path> {"model", "input"} -> data[0].embedding.
class OpenAiEmbedder : public Embedder {
 public:
  OpenAiEmbedder(std::string endpoint, std::string model, std::string api_key,
                 std::string path = "/v1/embeddings", int timeout_seconds = 60);
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return "openai-embed:" + model_; }

 private:
  std::string endpoint_, model_, api_key_, path_;
  int timeout_seconds_;
};

// 0 when either vector is all zeros. Throws std::invalid_argument on a size mismatch.
double cosine(const std::vector<double>& a, const std::vector<double>& b);
// Jaccard overlap of the token sets (metric tokenizer).
double lexical_similarity(std::string_view a, std::string_view b);

struct Shot {
  std::string task_id;
  std::string task_text;
  std::vector<UIElement> elements;
  std::string gold_script;
  double similarity = 0.0;  // filled by select_shots
};

struct ShotSelection {
  std::vector<Shot> shots;  // most similar first
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultShots = 5;

// Top-k by cosine similarity, ties by task id. A null embedder ranks by
// lexical_similarity; a failing one falls back to it with a warning.
ShotSelection select_shots(const std::string& task_text, const std::vector<Shot>& pool, std::size_t k,
                           Embedder* embedder);

// --- Prompt -----------------------------------------------------------------------

using TokenEstimator = std::function<std::size_t(std::string_view)>;
std::size_t estimate_tokens(std::string_view text);  // ceil(chars / 4)

// Versioned prompt resources compiled into the library.
std::string_view default_role_preamble();
std::string_view default_api_reference();
std::string_view default_rules();
std::string_view api_reference_version();

struct PromptSpec {
  std::string role_preamble;
  std::string api_reference;
  std::vector<Shot> shots;  // most similar first
  std::vector<UIElement> elements;
  std::string rules;
  std::string task_text;
  std::size_t token_budget = 4000;
};

PromptSpec default_prompt_spec();

class BudgetImpossible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Prompt {
  std::string text;
  std::size_t tokens = 0;
  std::size_t dropped_elements = 0;  // counted over task and shot elements
  std::size_t dropped_shots = 0;
};

// All sections, no budget applied.
std::string render_prompt(const PromptSpec& spec);

// Drops the lowest-confidence elements (task and shots alike) until the
// prompt fits, then the least similar shots. Throws BudgetImpossible when
// the fixed sections alone do not fit.
Prompt build_prompt(const PromptSpec& spec, const TokenEstimator& estimator = estimate_tokens);

// --- Output extraction ---------------------------------------------------------------

struct Extraction {
  std::optional<script::ActionScript> script;
  std::string failure;  // set when script is empty
};

// First contiguous run of valid statements in a completion. Code fences end
// a run; comments, blank lines and `import pyautogui` inside a run are skipped.
Extraction extract_script(std::string_view completion);

// --- Runs ---------------------------------------------------------------------------

struct PredictionRecord {
  std::string task_id;
  std::string backend;
  std::string raw_output;
  std::optional<std::string> script;  // canonical serialization when parsed
  std::optional<std::string> failure;  // parse failure or backend error
  double latency_ms = 0.0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::string to_json_line(const PredictionRecord& record);
// Throws std::invalid_argument on a malformed line.
PredictionRecord record_from_json_line(std::string_view line);

// Reads a journal; later records for a task replace earlier ones and a
// truncated final line is ignored.
std::map<std::string, PredictionRecord> read_journal(const std::filesystem::path& path);

// Supplies DetACT elements for a screen (e.g. a cached screenparse run).
using ElementSource = std::function<std::vector<UIElement>(const dataset::Screen&, const dataset::TaskRecord&)>;

struct RunConfig {
  dataset::Split split = dataset::Split::kTest;
  std::size_t token_budget = 4000;
  std::size_t shots = kDefaultShots;
  llm::DecodingParams decoding;
  std::size_t parallelism = 1;
  bool attach_image = false;  // multimodal backends
  std::optional<std::filesystem::path> journal;
  bool resume = false;
  std::optional<std::size_t> max_tasks;  // stop after this many new predictions
  metrics::ScoringOptions scoring;
  PromptSpec prompt_template = default_prompt_spec();
};

class RunAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunResult {
  std::vector<PredictionRecord> records;  // sorted by task id
  metrics::ScoreReport report;
  bool complete = true;  // false when max_tasks stopped the run early
  std::vector<std::string> warnings;
};

// Scores the split's tasks. Backend errors and unparsable outputs are
// recorded per task; configuration problems throw RunAborted.
RunResult run_benchmark(const dataset::Dataset& dataset, llm::CompletionClient& client, const RunConfig& config,
                        Embedder* embedder = nullptr, const ElementSource& elements = {});

// Scores a finished set of predictions against the split's gold scripts.
// Tasks without a record count as missing.
metrics::ScoreReport score_records(const dataset::Dataset& dataset, dataset::Split split,
                                   const std::map<std::string, PredictionRecord>& records, const std::string& label,
                                   const metrics::ScoringOptions& options = {});

// --- Mock backends --------------------------------------------------------------------

// Answers every request with the gold script of request.task_id.
std::unique_ptr<llm::CompletionClient> make_echo_gold_client(const dataset::Dataset& dataset);
// Answers with text that never parses.
std::unique_ptr<llm::CompletionClient> make_garbage_client();

// --- Reports --------------------------------------------------------------------------

enum class ReportFormat { kJson, kCsv, kTable };
std::optional<ReportFormat> report_format_from_string(std::string_view s);

struct RenderOptions {
  int precision = 4;
  bool per_platform = true;
};

// One row per report (SS, M_p, K_p, W_p, AS), then per-platform rows.
std::string render_report(const std::vector<metrics::ScoreReport>& reports, ReportFormat format,
                          const RenderOptions& options = {});

}  // namespace actbench::harness
