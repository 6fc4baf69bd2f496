#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>

#include <json.hpp>

#include "actbench/fixture.hpp"
#include "actbench/harness.hpp"

namespace fs = std::filesystem;
using namespace actbench;
using namespace actbench::harness;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("actbench_h_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Shot shot(std::string id, std::string text) { return {std::move(id), std::move(text), {}, "pyautogui.click(1, 2)", 0}; }

UIElement element(std::string label, double confidence) {
  UIElement e;
  e.label = std::move(label);
  e.confidence = confidence;
  e.center = {10, 20};
  e.rect = {0, 10, 20, 30};
  return e;
}

// Two single-action test tasks on one web screen.
dataset::Dataset two_task_dataset() {
  dataset::Dataset ds;
  ds.name = "two";
  ds.version = "1";
  dataset::Screen s;
  s.id = "s1";
  s.platform = dataset::Platform::kWeb;
  s.width = 400;
  s.height = 300;
  s.boxes = {{Rect{10, 10, 110, 40}, "search-bar", dataset::BoxKind::kInteractable}};
  ds.screens.push_back(s);
  dataset::TaskRecord a;
  a.id = "a";
  a.screen_id = "s1";
  a.task_text = "Click the search bar";
  a.labeled_script = "pyautogui.click(<search-bar>)";
  a.split = dataset::Split::kTest;
  dataset::TaskRecord b = a;
  b.id = "b";
  b.task_text = "Press enter";
  b.labeled_script = "pyautogui.press('enter')";
  ds.tasks = {a, b};
  return ds;
}

}  // namespace

// --- select_shots ------------------------------------------------------------------

TEST(SelectShots, TruncatesToPool) {
  std::vector<Shot> pool = {shot("a", "open mail"), shot("b", "close mail"), shot("c", "play song")};
  auto sel = select_shots("open the mail", pool, 5, nullptr);
  EXPECT_EQ(sel.shots.size(), 3u);
}

TEST(SelectShots, IdenticalTaskRanksFirst) {
  std::vector<Shot> pool = {shot("a", "open mail"), shot("b", "search for shoes"), shot("c", "play song")};
  FunctionEmbedder emb("bag", [](const std::string& t) {
    std::vector<double> v(26, 0.0);
    for (char c : t)
      if (c >= 'a' && c <= 'z') v[c - 'a'] += 1;
    return v;
  });
  auto sel = select_shots("search for shoes", pool, 2, &emb);
  ASSERT_EQ(sel.shots.size(), 2u);
  EXPECT_EQ(sel.shots[0].task_id, "b");
  EXPECT_NEAR(sel.shots[0].similarity, 1.0, 1e-12);
  EXPECT_TRUE(sel.warnings.empty());
}

TEST(SelectShots, HandComputedCosineOrder) {
  // query (1,0,0); a=(1,1,0) -> 1/sqrt2, b=(0,1,0) -> 0, c=(3,1,0) -> 3/sqrt10, d=(1,0,1) -> 1/sqrt2.
  std::map<std::string, std::vector<double>> vectors = {
      {"q", {1, 0, 0}}, {"a", {1, 1, 0}}, {"b", {0, 1, 0}}, {"c", {3, 1, 0}}, {"d", {1, 0, 1}}};
  FunctionEmbedder emb("fixed", [&](const std::string& t) { return vectors.at(t); });
  std::vector<Shot> pool = {shot("d", "d"), shot("b", "b"), shot("a", "a"), shot("c", "c")};
  auto sel = select_shots("q", pool, 4, &emb);
  ASSERT_EQ(sel.shots.size(), 4u);
  EXPECT_EQ(sel.shots[0].task_id, "c");
  EXPECT_EQ(sel.shots[1].task_id, "a");  // tie with d, broken by id
  EXPECT_EQ(sel.shots[2].task_id, "d");
  EXPECT_EQ(sel.shots[3].task_id, "b");
  EXPECT_NEAR(sel.shots[0].similarity, 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(sel.shots[1].similarity, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sel.shots[3].similarity, 0.0, 1e-12);
}

TEST(SelectShots, PermutationDoesNotChangeSelection) {
  std::vector<Shot> pool;
  for (int i = 0; i < 12; ++i) pool.push_back(shot("t" + std::to_string(i), "open item " + std::to_string(i % 4)));
  const auto ids = [](const ShotSelection& s) {
    std::vector<std::string> out;
    for (const auto& x : s.shots) out.push_back(x.task_id);
    return out;
  };
  const auto base = ids(select_shots("open item 2", pool, 5, nullptr));
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(pool.begin(), pool.end(), rng);
    EXPECT_EQ(ids(select_shots("open item 2", pool, 5, nullptr)), base);
  }
}

TEST(SelectShots, FailingEmbedderFallsBackToLexical) {
  FunctionEmbedder emb("down", [](const std::string&) -> std::vector<double> {
    throw EmbedderUnavailable("connection refused");
  });
  std::vector<Shot> pool = {shot("a", "play the next song"), shot("b", "search for shoes")};
  auto sel = select_shots("search for red shoes", pool, 1, &emb);
  ASSERT_EQ(sel.shots.size(), 1u);
  EXPECT_EQ(sel.shots[0].task_id, "b");
  ASSERT_EQ(sel.warnings.size(), 1u);
  EXPECT_NE(sel.warnings[0].find("lexical"), std::string::npos);
}

TEST(Cosine, ZeroVectorAndMismatch) {
  EXPECT_EQ(cosine({0, 0}, {1, 2}), 0.0);
  EXPECT_THROW(cosine({1}, {1, 2}), std::invalid_argument);
}

// --- build_prompt --------------------------------------------------------------------

TEST(BuildPrompt, SectionOrder) {
  PromptSpec spec = default_prompt_spec();
  spec.shots = {shot("a", "Open mail")};
  spec.elements = {element("Inbox", 0.9)};
  spec.task_text = "Open the inbox";
  const auto p = build_prompt(spec);
  EXPECT_EQ(p.dropped_elements, 0u);
  EXPECT_EQ(p.dropped_shots, 0u);
  EXPECT_LE(p.tokens, spec.token_budget);
  const auto api = p.text.find("# API reference");
  const auto ex = p.text.find("# Examples");
  const auto el = p.text.find("# Screen elements\n");
  const auto rules = p.text.find("# Rules");
  const auto task = p.text.find("# Task");
  EXPECT_EQ(p.text.find(std::string(default_role_preamble()).substr(0, 20)), 0u);
  EXPECT_LT(api, ex);
  EXPECT_LT(ex, el);
  EXPECT_LT(el, rules);
  EXPECT_LT(rules, task);
  EXPECT_NE(p.text.find("Inbox"), std::string::npos);
  EXPECT_TRUE(p.text.ends_with("Open the inbox\nScript:\n"));
}

TEST(BuildPrompt, EmptyElementsKeepsFixedSections) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "Do something";
  const auto p = build_prompt(spec);
  for (const char* section : {"# API reference", "# Screen elements", "# Rules", "# Task"})
    EXPECT_NE(p.text.find(section), std::string::npos) << section;
  EXPECT_NE(p.text.find("(none)"), std::string::npos);
}

TEST(BuildPrompt, DropsExactlyLowestConfidence) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "Click OK";
  spec.elements = {element("alpha-element", 0.9), element("bravo-element", 0.2), element("charlie-element", 0.5),
                   element("delta-element", 0.1), element("echo-element", 0.7)};
  PromptSpec expected = spec;
  expected.elements = {spec.elements[0], spec.elements[2], spec.elements[4]};
  spec.token_budget = estimate_tokens(render_prompt(expected));

  const auto p = build_prompt(spec);
  EXPECT_EQ(p.dropped_elements, 2u);
  EXPECT_EQ(p.text, render_prompt(expected));
  EXPECT_EQ(p.text.find("bravo-element"), std::string::npos);
  EXPECT_EQ(p.text.find("delta-element"), std::string::npos);
}

TEST(BuildPrompt, ShotsDroppedFromLeastSimilar) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "Click OK";
  spec.shots = {shot("near", "first example task"), shot("far", "second example task")};
  spec.shots[0].elements = {element("near-el", 0.3)};
  PromptSpec expected = spec;
  expected.shots.pop_back();
  expected.shots[0].elements.clear();
  spec.token_budget = estimate_tokens(render_prompt(expected));
  const auto p = build_prompt(spec);
  EXPECT_EQ(p.dropped_shots, 1u);
  EXPECT_EQ(p.dropped_elements, 1u);
  EXPECT_NE(p.text.find("first example task"), std::string::npos);
  EXPECT_EQ(p.text.find("second example task"), std::string::npos);
}

TEST(BuildPrompt, BudgetImpossible) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "x";
  spec.token_budget = 10;
  EXPECT_THROW(build_prompt(spec), BudgetImpossible);
}

TEST(BuildPrompt, Deterministic) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "Click OK";
  for (int i = 0; i < 40; ++i) spec.elements.push_back(element("el" + std::to_string(i), (i * 37 % 11) / 10.0));
  spec.token_budget = estimate_tokens(render_prompt(spec)) - 50;
  EXPECT_EQ(build_prompt(spec).text, build_prompt(spec).text);
}

TEST(BuildPrompt, CustomEstimator) {
  PromptSpec spec = default_prompt_spec();
  spec.task_text = "Click OK";
  const auto p = build_prompt(spec, [](std::string_view s) { return s.size(); });
  EXPECT_EQ(p.tokens, p.text.size());
}

TEST(ApiReference, Versioned) { EXPECT_EQ(api_reference_version(), "api-reference v1"); }

// --- extract_script --------------------------------------------------------------------

TEST(ExtractScript, FencedBlockAfterProse) {
  const auto e = extract_script(
      "Sure! Here is the script:\n```python\nimport pyautogui\npyautogui.click(10, 20)\n"
      "# type the query\npyautogui.write('shoes')\n```\nThat should work.");
  ASSERT_TRUE(e.script);
  EXPECT_EQ(e.script->actions.size(), 2u);
  EXPECT_EQ(e.script->source_text, "pyautogui.click(10, 20)\npyautogui.write('shoes')");
}

TEST(ExtractScript, FirstRunOnly) {
  const auto e = extract_script("pyautogui.press('enter')\nthen\npyautogui.click(1, 2)");
  ASSERT_TRUE(e.script);
  EXPECT_EQ(e.script->actions.size(), 1u);
}

TEST(ExtractScript, FenceEndsRun) {
  const auto e = extract_script("```\npyautogui.press('a')\n```\n```\npyautogui.press('b')\n```");
  ASSERT_TRUE(e.script);
  EXPECT_EQ(e.script->actions.size(), 1u);
}

TEST(ExtractScript, ProseOnlyFails) {
  const auto e = extract_script("I cannot do that. Try clicking (near the top).");
  EXPECT_FALSE(e.script);
  EXPECT_FALSE(e.failure.empty());
  EXPECT_FALSE(extract_script("").script);
  EXPECT_FALSE(extract_script("import pyautogui\n").script);
}

// --- journal ------------------------------------------------------------------------------

TEST(Journal, RoundTripAndPartialTail) {
  TempDir dir;
  PredictionRecord a{"a", "mock", "raw \"text\"\n", std::string("pyautogui.press('enter')"), std::nullopt, 1.5};
  PredictionRecord b{"b", "mock", "???", std::nullopt, std::string("no statement"), 2.0};
  PredictionRecord a2 = a;
  a2.latency_ms = 9.0;
  EXPECT_EQ(record_from_json_line(to_json_line(a)), a);
  const auto path = dir.path() / "j.ndjson";
  std::ofstream(path) << to_json_line(a) << '\n' << to_json_line(b) << '\n' << to_json_line(a2) << '\n'
                      << R"({"task_id": "c", "back)";
  const auto records = read_journal(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records.at("a"), a2);
  EXPECT_EQ(records.at("b"), b);
}

TEST(Journal, CorruptMiddleLineAborts) {
  TempDir dir;
  const auto path = dir.path() / "j.ndjson";
  std::ofstream(path) << "not json\n{}\n";
  EXPECT_THROW(read_journal(path), RunAborted);
}

TEST(Journal, RecordNeedsExactlyOneOutcome) {
  EXPECT_THROW(record_from_json_line(R"({"task_id":"a","script":null,"failure":null})"), std::invalid_argument);
  EXPECT_THROW(record_from_json_line(R"({"task_id":"a","script":"x","failure":"y"})"), std::invalid_argument);
}

// --- run_benchmark ------------------------------------------------------------------------

TEST(RunBenchmark, EchoGoldScoresOne) {
  const auto ds = fixture::make_fixture();
  auto client = make_echo_gold_client(ds);
  const auto result = run_benchmark(ds, *client, {});
  EXPECT_EQ(result.records.size(), 10u);
  EXPECT_TRUE(result.complete);
  EXPECT_DOUBLE_EQ(result.report.overall.action_score, 1.0);
  EXPECT_EQ(result.report.overall.parse_failures, 0u);
  EXPECT_GT(result.report.by_platform.size(), 1u);
}

TEST(RunBenchmark, GarbageScoresZero) {
  const auto ds = fixture::make_fixture();
  auto client = make_garbage_client();
  const auto result = run_benchmark(ds, *client, {});
  EXPECT_EQ(result.report.overall.action_score, 0.0);
  EXPECT_EQ(result.report.overall.parse_failures, result.report.overall.episodes);
  for (const auto& r : result.records) EXPECT_TRUE(r.failure.has_value());
}

TEST(RunBenchmark, OneOfTwoCorrect) {
  // a: exact click. b: press with the wrong key, so K = alpha and its contribution is 0.
  const auto ds = two_task_dataset();
  llm::FunctionClient client("half", [](const llm::CompletionRequest& r) {
    return r.task_id == "a" ? std::string("pyautogui.click(50, 25)") : std::string("pyautogui.press('tab')");
  });
  const auto result = run_benchmark(ds, client, {});
  EXPECT_NEAR(result.report.overall.action_score, 0.5, 1e-12);
  EXPECT_NEAR(result.report.overall.seq_score_sum, 0.2, 1e-12);
}

TEST(RunBenchmark, BackendErrorsAreRecorded) {
  const auto ds = two_task_dataset();
  llm::FunctionClient client("flaky", [](const llm::CompletionRequest& r) -> std::string {
    if (r.task_id == "b") throw llm::ClientError("HTTP 500");
    return "pyautogui.click(50, 25)";
  });
  const auto result = run_benchmark(ds, client, {});
  ASSERT_EQ(result.records.size(), 2u);
  EXPECT_TRUE(result.records[1].failure.has_value());
  EXPECT_NE(result.records[1].failure->find("HTTP 500"), std::string::npos);
  EXPECT_EQ(result.report.overall.parse_failures, 1u);
}

TEST(RunBenchmark, ConfigErrorsAbort) {
  const auto ds = two_task_dataset();
  auto client = make_echo_gold_client(ds);
  RunConfig config;
  config.parallelism = 0;
  EXPECT_THROW(run_benchmark(ds, *client, config), RunAborted);
  config.parallelism = 1;
  config.token_budget = 5;
  EXPECT_THROW(run_benchmark(ds, *client, config), RunAborted);
}

TEST(RunBenchmark, ResumeMatchesUninterrupted) {
  TempDir dir;
  const auto ds = fixture::make_fixture();
  auto client = make_echo_gold_client(ds);
  llm::FunctionClient mixed("mixed", [&](const llm::CompletionRequest& r) {
    return std::hash<std::string>{}(r.task_id) % 3 == 0 ? std::string("no idea") : client->complete(r).text;
  });

  RunConfig full;
  full.journal = dir.path() / "full.ndjson";
  const auto reference = run_benchmark(ds, mixed, full);

  RunConfig part;
  part.journal = dir.path() / "part.ndjson";
  part.max_tasks = 4;
  const auto first = run_benchmark(ds, mixed, part);
  EXPECT_FALSE(first.complete);
  // Simulate a crash mid-write.
  std::ofstream(*part.journal, std::ios::app) << R"({"task_id":"zz","ra)";
  part.max_tasks.reset();
  part.resume = true;
  const auto resumed = run_benchmark(ds, mixed, part);
  EXPECT_TRUE(resumed.complete);

  for (auto format : {ReportFormat::kJson, ReportFormat::kCsv, ReportFormat::kTable})
    EXPECT_EQ(render_report({resumed.report}, format), render_report({reference.report}, format));
  EXPECT_EQ(read_journal(*part.journal).size(), 10u);
}

TEST(RunBenchmark, ParallelMatchesSerial) {
  const auto ds = fixture::make_fixture();
  auto client = make_echo_gold_client(ds);
  RunConfig serial, parallel;
  parallel.parallelism = 4;
  const auto a = run_benchmark(ds, *client, serial);
  const auto b = run_benchmark(ds, *client, parallel);
  EXPECT_EQ(render_report({a.report}, ReportFormat::kJson), render_report({b.report}, ReportFormat::kJson));
}

TEST(RunBenchmark, PromptCarriesShotsAndElements) {
  const auto ds = fixture::make_fixture();
  std::vector<std::string> prompts;
  std::mutex m;
  llm::FunctionClient spy("spy", [&](const llm::CompletionRequest& r) {
    std::lock_guard lock(m);
    prompts.push_back(r.user);
    return std::string("pyautogui.press('enter')");
  });
  ElementSource source = [](const dataset::Screen& s, const dataset::TaskRecord&) {
    std::vector<UIElement> out;
    for (const auto& b : s.boxes) out.push_back(element(b.label, 0.8));
    return out;
  };
  RunConfig config;
  config.max_tasks = 2;
  run_benchmark(ds, spy, config, nullptr, source);
  ASSERT_EQ(prompts.size(), 2u);
  for (const auto& p : prompts) {
    EXPECT_NE(p.find("## Example 5"), std::string::npos);
    EXPECT_EQ(p.find("## Example 6"), std::string::npos);
    EXPECT_NE(p.find("search-bar"), std::string::npos);
    EXPECT_LE(estimate_tokens(p), 4000u);
  }
}

TEST(RunBenchmark, ParseFailureContributesZero) {
  const auto ds = fixture::make_fixture({.tasks = 30, .seed = 4});
  auto gold = make_echo_gold_client(ds);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::set<std::string> broken;
    for (const auto& t : ds.tasks)
      if (rng() % 2) broken.insert(t.id);
    llm::FunctionClient client("partial", [&](const llm::CompletionRequest& r) {
      return broken.contains(r.task_id) ? std::string("garbage") : gold->complete(r).text;
    });
    const auto result = run_benchmark(ds, client, {});
    for (const auto& ep : result.report.episodes) {
      if (broken.contains(ep.task_id)) {
        EXPECT_EQ(ep.score.clamped_contribution, 0.0);
        EXPECT_EQ(ep.score.seq_score, 0.0);
      }
    }
  }
}

TEST(ScoreRecords, MissingRecordsCounted) {
  const auto ds = two_task_dataset();
  const auto report = score_records(ds, dataset::Split::kTest, {}, "empty");
  EXPECT_EQ(report.overall.missing, 2u);
  EXPECT_EQ(report.overall.action_score, 0.0);
}

// --- render_report ---------------------------------------------------------------------------

TEST(RenderReport, Gpt4ReferenceRow) {
  metrics::ScoreReport r;
  r.label = "GPT-4";
  r.overall.episodes = 1;
  r.overall.seq_score_mean = 32.75;
  r.overall.click_penalty_mean = 10.27;
  r.overall.key_penalty_mean = 6.99;
  r.overall.write_penalty_mean = 3.89;
  r.overall.action_score = 11.60;
  const auto table = render_report({r}, ReportFormat::kTable, {.precision = 2, .per_platform = false});
  EXPECT_NE(table.find("GPT-4"), std::string::npos);
  EXPECT_NE(table.find("32.75"), std::string::npos);
  EXPECT_NE(table.find("11.60"), std::string::npos);
  const auto csv = render_report({r}, ReportFormat::kCsv, {.precision = 2, .per_platform = false});
  EXPECT_EQ(csv,
            "model,platform,episodes,parse_failures,missing,SS,M_p,K_p,W_p,AS\n"
            "GPT-4,all,1,0,0,32.75,10.27,6.99,3.89,11.60\n");
}

TEST(RenderReport, EmptyReportHeadersOnly) {
  EXPECT_EQ(render_report({}, ReportFormat::kCsv), "model,platform,episodes,parse_failures,missing,SS,M_p,K_p,W_p,AS\n");
  const auto table = render_report({metrics::ScoreReport{}}, ReportFormat::kTable);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1);
  for (const char* h : {"SS", "M_p", "K_p", "W_p", "AS"}) EXPECT_NE(table.find(h), std::string::npos);
}

TEST(RenderReport, PerfectRunAndPlatformRows) {
  const auto ds = fixture::make_fixture();
  auto client = make_echo_gold_client(ds);
  const auto result = run_benchmark(ds, *client, {});
  const auto csv = render_report({result.report}, ReportFormat::kCsv);
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << result.report.overall.seq_score_mean;
  EXPECT_NE(csv.find("mock:echo-gold,all,10,0,0," + ss.str() + ",0.0000,0.0000,0.0000,1.0000"), std::string::npos);
  for (const auto& [platform, s] : result.report.by_platform)
    EXPECT_NE(csv.find("mock:echo-gold," + platform + ","), std::string::npos);

  const auto j = nlohmann::json::parse(render_report({result.report}, ReportFormat::kJson));
  EXPECT_EQ(j["reports"][0]["overall"]["AS"].get<double>(), 1.0);
  EXPECT_EQ(j["reports"][0]["episodes"].size(), 10u);
}

TEST(ReportFormat, FromString) {
  EXPECT_EQ(report_format_from_string("csv"), ReportFormat::kCsv);
  EXPECT_EQ(report_format_from_string("table"), ReportFormat::kTable);
  EXPECT_EQ(report_format_from_string("json"), ReportFormat::kJson);
  EXPECT_FALSE(report_format_from_string("xml"));
}
