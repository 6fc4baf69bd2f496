#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "actbench/harness.hpp"

namespace actbench::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string to_json_line(const PredictionRecord& r) {
  json j = {{"task_id", r.task_id},
            {"backend", r.backend},
            {"raw", r.raw_output},
            {"script", r.script ? json(*r.script) : json(nullptr)},
            {"failure", r.failure ? json(*r.failure) : json(nullptr)},
            {"latency_ms", r.latency_ms}};
  return j.dump();
}

PredictionRecord record_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception&) {
    throw std::invalid_argument("journal line is not JSON");
  }
  if (!j.is_object() || !j.contains("task_id") || !j["task_id"].is_string())
    throw std::invalid_argument("journal line lacks task_id");
  PredictionRecord r;
  r.task_id = j["task_id"].get<std::string>();
  r.backend = j.value("backend", "");
  r.raw_output = j.value("raw", "");
  if (j.contains("script") && j["script"].is_string()) r.script = j["script"].get<std::string>();
  if (j.contains("failure") && j["failure"].is_string()) r.failure = j["failure"].get<std::string>();
  r.latency_ms = j.value("latency_ms", 0.0);
  if (r.script.has_value() == r.failure.has_value())
    throw std::invalid_argument("journal record " + r.task_id + " needs exactly one of script/failure");
  return r;
}

std::map<std::string, PredictionRecord> read_journal(const fs::path& path) {
  std::map<std::string, PredictionRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string content((std::istreambuf_iterator<char>(in)), {});
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) break;  // interrupted mid-write
    const std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto r = record_from_json_line(line);
      records.insert_or_assign(r.task_id, std::move(r));
    } catch (const std::invalid_argument& e) {
      throw RunAborted(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

namespace {

struct EvalTask {
  const dataset::TaskRecord* task;
  const dataset::Screen* screen;
  dataset::GoldTask gold;
};

std::vector<EvalTask> eval_tasks(const dataset::Dataset& ds, dataset::Split split, std::vector<std::string>* warnings) {
  std::vector<EvalTask> out;
  for (const auto& t : ds.tasks) {
    if (t.split != split) continue;
    const auto* screen = ds.find_screen(t.screen_id);
    if (screen == nullptr) {
      if (warnings) warnings->push_back("task " + t.id + ": screen " + t.screen_id + " missing; skipped");
      continue;
    }
    try {
      out.push_back({&t, screen, dataset::resolve_gold(t, *screen)});
    } catch (const dataset::RecordRejected& e) {
      if (warnings) warnings->push_back("task " + t.id + " skipped: " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const EvalTask& a, const EvalTask& b) { return a.task->id < b.task->id; });
  return out;
}

class CachingEmbedder : public Embedder {
 public:
  explicit CachingEmbedder(Embedder& inner) : inner_(inner) {}
  std::vector<double> embed(const std::string& text) override {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(text); it != cache_.end()) return it->second;
    }
    auto v = inner_.embed(text);
    std::lock_guard lock(mutex_);
    return cache_.emplace(text, std::move(v)).first->second;
  }
  std::string name() const override { return inner_.name(); }

 private:
  Embedder& inner_;
  std::mutex mutex_;
  std::map<std::string, std::vector<double>> cache_;
};

class FixedAnswerClient : public llm::CompletionClient {
 public:
  FixedAnswerClient(std::string id, std::map<std::string, std::string> answers, std::string fallback)
      : id_(std::move(id)), answers_(std::move(answers)), fallback_(std::move(fallback)) {}
  llm::CompletionResponse complete(const llm::CompletionRequest& request) override {
    llm::CompletionResponse r;
    auto it = answers_.find(request.task_id);
    r.text = it == answers_.end() ? fallback_ : it->second;
    r.usage.prompt = static_cast<int>(estimate_tokens(request.system) + estimate_tokens(request.user));
    r.usage.completion = static_cast<int>(estimate_tokens(r.text));
    return r;
  }
  std::string id() const override { return id_; }

 private:
  std::string id_;
  std::map<std::string, std::string> answers_;
  std::string fallback_;
};

}  // namespace

std::unique_ptr<llm::CompletionClient> make_echo_gold_client(const dataset::Dataset& ds) {
  std::map<std::string, std::string> answers;
  for (const auto& t : ds.tasks) {
    const auto* screen = ds.find_screen(t.screen_id);
    if (screen == nullptr) continue;
    try {
      const auto gold = dataset::resolve_gold(t, *screen);
      answers[t.id] = "```python\nimport pyautogui\n" + script::serialize_script(gold.script) + "\n```";
    } catch (const dataset::RecordRejected&) {
    }
  }
  return std::make_unique<FixedAnswerClient>("mock:echo-gold", std::move(answers), "");
}

std::unique_ptr<llm::CompletionClient> make_garbage_client() {
  return std::make_unique<FixedAnswerClient>(
      "mock:garbage", std::map<std::string, std::string>{},
      "I am not able to operate a computer, but you could try clicking the search bar (somewhere near the top).");
}

metrics::ScoreReport score_records(const dataset::Dataset& ds, dataset::Split split,
                                   const std::map<std::string, PredictionRecord>& records, const std::string& label,
                                   const metrics::ScoringOptions& options) {
  std::vector<metrics::ScoredEpisode> episodes;
  for (const auto& e : eval_tasks(ds, split, nullptr)) {
    metrics::ScoredEpisode ep;
    ep.task_id = e.task->id;
    ep.platform = std::string(dataset::display_name(e.screen->platform));
    auto it = records.find(e.task->id);
    std::optional<script::ActionScript> predicted;
    if (it == records.end()) {
      ep.status = metrics::PredictionStatus::kMissing;
    } else if (it->second.script) {
      try {
        predicted = script::parse_script(*it->second.script);
      } catch (const script::ScriptError&) {
      }
      ep.status = predicted ? metrics::PredictionStatus::kParsed : metrics::PredictionStatus::kParseFailure;
    } else {
      ep.status = metrics::PredictionStatus::kParseFailure;
    }
    ep.score = predicted ? metrics::score_episode(*predicted, e.gold.actions, options)
                         : metrics::score_unparsed(e.gold.actions);
    episodes.push_back(std::move(ep));
  }
  return metrics::make_report(label, std::move(episodes), options);
}

RunResult run_benchmark(const dataset::Dataset& ds, llm::CompletionClient& client, const RunConfig& config,
                        Embedder* embedder, const ElementSource& element_source) {
  if (config.parallelism < 1) throw RunAborted("parallelism must be at least 1");
  if (config.token_budget == 0) throw RunAborted("token budget must be positive");

  RunResult result;
  const auto tasks = eval_tasks(ds, config.split, &result.warnings);

  // Shot pool: resolvable training tasks.
  std::vector<Shot> pool;
  std::map<std::string, std::pair<const dataset::TaskRecord*, const dataset::Screen*>> pool_source;
  for (const auto& e : eval_tasks(ds, dataset::Split::kTrain, nullptr)) {
    pool.push_back({e.task->id, e.task->task_text, {}, script::serialize_script(e.gold.script), 0.0});
    pool_source[e.task->id] = {e.task, e.screen};
  }

  std::map<std::string, PredictionRecord> done;
  if (config.journal && config.resume) done = read_journal(*config.journal);
  std::ofstream journal;
  if (config.journal) {
    if (config.journal->has_parent_path()) fs::create_directories(config.journal->parent_path());
    if (config.resume && fs::exists(*config.journal)) {
      // Cut a torn final record so appended records start on a fresh line.
      const std::string content = [&] {
        std::ifstream in(*config.journal, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), {});
      }();
      const auto last_nl = content.rfind('\n');
      const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
      if (keep != content.size()) fs::resize_file(*config.journal, keep);
    }
    journal.open(*config.journal, config.resume ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
    if (!journal) throw RunAborted("cannot open journal " + config.journal->string());
  }

  std::vector<const EvalTask*> pending;
  for (const auto& e : tasks)
    if (!done.contains(e.task->id)) pending.push_back(&e);
  if (config.max_tasks && pending.size() > *config.max_tasks) {
    pending.resize(*config.max_tasks);
    result.complete = false;
  }

  std::optional<CachingEmbedder> cached;
  if (embedder != nullptr) cached.emplace(*embedder);
  Embedder* emb = cached ? &*cached : nullptr;

  std::mutex source_mutex, journal_mutex, warn_mutex;
  std::map<std::string, std::vector<UIElement>> element_cache;
  auto elements_for = [&](const dataset::TaskRecord& t, const dataset::Screen& s) -> std::vector<UIElement> {
    if (!element_source) return {};
    std::lock_guard lock(source_mutex);
    auto it = element_cache.find(t.id);
    if (it == element_cache.end()) it = element_cache.emplace(t.id, element_source(s, t)).first;
    return it->second;
  };

  std::set<std::string> warnings;
  std::vector<PredictionRecord> fresh;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::string abort_reason;

  auto worker = [&] {
    while (!abort) {
      const std::size_t i = next++;
      if (i >= pending.size()) return;
      const EvalTask& e = *pending[i];
      try {
        std::vector<Shot> candidates;
        for (const auto& s : pool)
          if (s.task_id != e.task->id) candidates.push_back(s);
        auto selection = select_shots(e.task->task_text, candidates, config.shots, emb);
        for (auto& shot : selection.shots) {
          const auto& [t, s] = pool_source.at(shot.task_id);
          shot.elements = elements_for(*t, *s);
        }

        PromptSpec spec = config.prompt_template;
        spec.shots = std::move(selection.shots);
        spec.elements = elements_for(*e.task, *e.screen);
        spec.task_text = e.task->task_text;
        spec.token_budget = config.token_budget;
        const Prompt prompt = build_prompt(spec);

        llm::CompletionRequest request;
        request.user = prompt.text;
        request.decoding = config.decoding;
        request.task_id = e.task->id;
        if (config.attach_image) request.image = llm::Attachment{e.screen->image, "image/png"};

        PredictionRecord record;
        record.task_id = e.task->id;
        record.backend = client.id();
        const auto t0 = std::chrono::steady_clock::now();
        try {
          record.raw_output = client.complete(request).text;
          auto extraction = extract_script(record.raw_output);
          if (extraction.script) record.script = script::serialize_script(*extraction.script);
          else record.failure = extraction.failure;
        } catch (const llm::ClientError& err) {
          record.failure = std::string("backend error: ") + err.what();
        }
        record.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        {
          std::lock_guard lock(warn_mutex);
          warnings.insert(selection.warnings.begin(), selection.warnings.end());
        }
        std::lock_guard lock(journal_mutex);
        if (journal.is_open()) journal << to_json_line(record) << '\n' << std::flush;
        fresh.push_back(std::move(record));
      } catch (const BudgetImpossible& err) {
        std::lock_guard lock(journal_mutex);
        if (!abort.exchange(true)) abort_reason = err.what();
      }
    }
  };

  const std::size_t n_threads = std::min(config.parallelism, std::max<std::size_t>(1, pending.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (abort) throw RunAborted(abort_reason);

  for (auto& r : fresh) done.insert_or_assign(r.task_id, std::move(r));
  for (const auto& [id, r] : done) result.records.push_back(r);
  result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
  result.report = score_records(ds, config.split, done, client.id(), config.scoring);
  return result;
}

}  // namespace actbench::harness
