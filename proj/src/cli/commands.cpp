#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <opencv2/imgcodecs.hpp>

#include "actbench/cli.hpp"
#include "actbench/fixture.hpp"

namespace actbench::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using screenparse::UIElement;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// Rejects output paths inside the dataset directory.
void check_outside(const fs::path& dataset_root, const fs::path& output) {
  const auto root = fs::weakly_canonical(fs::absolute(dataset_root));
  const auto target = fs::weakly_canonical(fs::absolute(output));
  auto r = root.begin();
  auto t = target.begin();
  for (; r != root.end() && t != target.end(); ++r, ++t)
    if (*r != *t) return;
  if (r == root.end() || r->empty())
    throw ConfigError("refusing to write " + output.string() + " inside the dataset directory");
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

dataset::Split parse_split(const std::string& s) {
  auto split = dataset::split_from_string(s);
  if (!split) throw ConfigError("unknown split \"" + s + "\" (train, validation, test)");
  return *split;
}

harness::ReportFormat parse_format(const std::string& s) {
  auto f = harness::report_format_from_string(s);
  if (!f) throw ConfigError("unknown format \"" + s + "\" (json, csv, table)");
  return *f;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

void summary_line(std::ostream& out, const metrics::ScoreSummary& s) {
  out << "AS=" << fixed(s.action_score) << " SS=" << fixed(s.seq_score_mean) << " episodes=" << s.episodes
      << " parse_failures=" << s.parse_failures << " missing=" << s.missing << '\n';
}

// --- validate ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string dataset;
  std::string format = "table";
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "table" && a.format != "json") throw ConfigError("validate supports --format table or json");
  json findings = json::array();
  auto emit = [&](json finding, const std::string& line) {
    findings.push_back(std::move(finding));
    if (a.format == "table") out << line << '\n';
  };

  dataset::Dataset ds;
  try {
    ds = dataset::load_dataset(a.dataset);
  } catch (const dataset::ManifestError&) {
    throw;
  } catch (const dataset::DatasetError& e) {
    emit({{"kind", e.kind()}, {"file", e.file().string()}, {"where", e.where()}, {"message", e.what()}}, e.what());
    if (a.format == "json") out << json{{"ok", false}, {"findings", findings}}.dump(2) << '\n';
    return kFindings;
  }
  print_warnings(err, ds.warnings);

  const auto filtered = dataset::filter_records(ds);
  for (const auto& r : filtered.rejected)
    emit({{"kind", std::string(dataset::to_string(r.reason))}, {"task_id", r.task_id}, {"message", r.message}},
         r.task_id + ": " + std::string(dataset::to_string(r.reason)) + ": " + r.message);
  const auto verdict = dataset::check_split_integrity(ds);
  for (const auto& v : verdict.violations)
    emit({{"kind", std::string(dataset::to_string(v.kind))}, {"task_ids", {v.task_a, v.task_b}}, {"text", v.text}},
         v.task_a + ", " + v.task_b + ": " + std::string(dataset::to_string(v.kind)) + ": \"" + v.text + "\"");

  if (a.format == "json") {
    out << json{{"ok", findings.empty()},
                {"screens", ds.screens.size()},
                {"tasks", ds.tasks.size()},
                {"findings", findings}}
               .dump(2)
        << '\n';
  } else {
    out << ds.screens.size() << " screens, " << ds.tasks.size() << " tasks, " << findings.size()
        << (findings.size() == 1 ? " finding" : " findings") << '\n';
  }
  return findings.empty() ? kOk : kFindings;
}

// --- score ------------------------------------------------------------------------------------

struct ReportArgs {
  std::string split = "test";
  std::string format = "table";
  std::string out;
  int precision = 4;
  bool no_per_platform = false;
  std::string write_gate = "positive";
  std::string normalization = "predicted";

  metrics::ScoringOptions scoring() const {
    metrics::ScoringOptions o;
    if (write_gate == "strict") o.write_gate = metrics::WriteGate::kStrictPaper;
    else if (write_gate != "positive") throw ConfigError("--write-gate must be positive or strict");
    if (normalization == "gold-max") o.normalization = metrics::Normalization::kGoldMaximum;
    else if (normalization != "predicted") throw ConfigError("--normalization must be predicted or gold-max");
    return o;
  }
  harness::RenderOptions render() const { return {precision, !no_per_platform}; }
};

void emit_report(const ReportArgs& a, const metrics::ScoreReport& report, std::ostream& out) {
  const auto text = harness::render_report({report}, parse_format(a.format), a.render());
  if (a.out.empty()) out << text;
  else write_file(a.out, text);
  summary_line(out, report.overall);
}

struct ScoreArgs {
  std::string dataset;
  std::string predictions;
  std::string label;
  ReportArgs report;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto split = parse_split(a.report.split);
  const auto scoring = a.report.scoring();
  parse_format(a.report.format);
  if (!a.report.out.empty()) check_outside(a.dataset, a.report.out);
  const auto ds = dataset::load_dataset(a.dataset);
  const auto predictions = read_predictions(a.predictions);
  for (const auto& [id, record] : predictions)
    if (std::none_of(ds.tasks.begin(), ds.tasks.end(), [&](const auto& t) { return t.id == id; }))
      err << "warning: prediction for unknown task " << id << '\n';
  const std::string label = a.label.empty() ? fs::path(a.predictions).stem().string() : a.label;
  const auto report = harness::score_records(ds, split, predictions, label, scoring);
  if (report.overall.missing > 0)
    err << report.overall.missing << " of " << report.overall.episodes << " tasks have no prediction\n";
  emit_report(a.report, report, out);
  return kOk;
}

// --- parse-screen ---------------------------------------------------------------------------

struct ParseScreenArgs {
  std::string image;
  std::string task;
  std::string backend_config;
  std::string out;
  bool no_filter = false;
};

int cmd_parse_screen(const ParseScreenArgs& a, std::ostream& out, std::ostream& err, const Environment& env) {
  if (!fs::is_regular_file(a.image)) throw IoError("image not found: " + a.image);
  const cv::Mat pixels = cv::imread(a.image, cv::IMREAD_COLOR);
  if (pixels.empty()) throw IoError("cannot decode image " + a.image);
  const auto config =
      load_backend_config(a.backend_config.empty() ? std::nullopt : std::optional<fs::path>(a.backend_config), env);
  auto backends = make_screen_backends(config, !a.no_filter);
  const auto parse = screenparse::parse_screen({pixels, fs::path(a.image)}, a.task, backends.pipeline());
  print_warnings(err, parse.warnings);
  json j = screen_parse_to_json(parse);
  j["image"] = a.image;
  j["task"] = a.task;
  j["filtered"] = backends.filter != nullptr;
  const auto text = j.dump(2) + "\n";
  if (a.out.empty()) out << text;
  else write_file(a.out, text);
  return kOk;
}

// --- run ------------------------------------------------------------------------------------------

struct RunArgs {
  std::string dataset;
  std::string backend_config;
  std::string journal;
  bool resume = false;
  std::size_t max_tasks = 0;
  std::size_t token_budget = 0;
  std::size_t shots = 0;
  std::size_t parallelism = 0;
  std::string elements;
  bool no_filter = false;
  ReportArgs report;
  CLI::App* app = nullptr;
};

harness::ElementSource make_element_source(const std::string& mode, const BackendConfig& config, bool use_filter,
                                           std::shared_ptr<std::vector<std::string>> warnings) {
  if (mode == "none") return {};
  if (mode == "boxes") {
    return [](const dataset::Screen& s, const dataset::TaskRecord&) {
      std::vector<UIElement> out;
      for (const auto& b : s.boxes) {
        UIElement e;
        e.label = b.label;
        e.rect = b.rect;
        e.center = {(b.rect.x_min + b.rect.x_max) / 2, (b.rect.y_min + b.rect.y_max) / 2};
        e.confidence = 1.0;
        e.provenance = "dataset-boxes";
        out.push_back(std::move(e));
      }
      return out;
    };
  }
  auto backends = std::make_shared<ScreenBackends>(make_screen_backends(config, use_filter));
  auto per_screen = std::make_shared<std::map<std::string, std::vector<UIElement>>>();
  // The harness serializes calls, so the caches need no lock of their own.
  return [backends, per_screen, warnings](const dataset::Screen& s, const dataset::TaskRecord& t) {
    const bool cacheable = backends->filter == nullptr;
    if (cacheable)
      if (auto it = per_screen->find(s.id); it != per_screen->end()) return it->second;
    std::vector<UIElement> elements;
    const cv::Mat pixels = cv::imread(s.image.string(), cv::IMREAD_COLOR);
    if (pixels.empty()) {
      warnings->push_back("screen " + s.id + ": image " + s.image.string() + " unreadable; no elements");
    } else {
      try {
        auto parse = screenparse::parse_screen({pixels, s.image}, t.task_text, backends->pipeline());
        elements = std::move(parse.elements);
        for (auto& w : parse.warnings) warnings->push_back("screen " + s.id + ": " + w);
      } catch (const std::exception& e) {
        warnings->push_back("screen " + s.id + ": screen parsing failed: " + e.what());
      }
    }
    if (cacheable) (*per_screen)[s.id] = elements;
    return elements;
  };
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err, const Environment& env) {
  auto config =
      load_backend_config(a.backend_config.empty() ? std::nullopt : std::optional<fs::path>(a.backend_config), env);
  if (a.app->count("--token-budget")) config.run.token_budget = a.token_budget;
  if (a.app->count("--shots")) config.run.shots = a.shots;
  if (a.app->count("--parallelism")) config.run.parallelism = a.parallelism;
  if (!a.elements.empty()) config.run.elements = a.elements;
  if (config.run.token_budget == 0) throw ConfigError("--token-budget must be positive");
  if (config.run.parallelism == 0) throw ConfigError("--parallelism must be at least 1");
  if (config.run.elements != "screenparse" && config.run.elements != "boxes" && config.run.elements != "none")
    throw ConfigError("--elements must be screenparse, boxes or none");
  if (a.resume && a.journal.empty()) throw ConfigError("--resume needs --journal");

  const auto split = parse_split(a.report.split);
  const auto scoring = a.report.scoring();
  parse_format(a.report.format);
  if (!a.report.out.empty()) check_outside(a.dataset, a.report.out);
  if (!a.journal.empty()) check_outside(a.dataset, a.journal);

  const auto ds = dataset::load_dataset(a.dataset);
  auto client = make_client(config.llm, &ds);
  if (!client) throw ConfigError("no llm backend configured (set llm.type or ACTBENCH_MODEL)");
  auto embedder = make_embedder(config.embedder);
  auto source_warnings = std::make_shared<std::vector<std::string>>();
  const auto source = make_element_source(config.run.elements, config, !a.no_filter, source_warnings);

  harness::RunConfig rc;
  rc.split = split;
  rc.token_budget = config.run.token_budget;
  rc.shots = config.run.shots;
  rc.decoding = config.decoding;
  rc.parallelism = config.run.parallelism;
  rc.attach_image = config.run.attach_image;
  if (!a.journal.empty()) rc.journal = a.journal;
  rc.resume = a.resume;
  if (a.app->count("--max-tasks")) rc.max_tasks = a.max_tasks;
  rc.scoring = scoring;

  const auto result = harness::run_benchmark(ds, *client, rc, embedder.get(), source);
  std::vector<std::string> warnings = result.warnings;
  std::sort(source_warnings->begin(), source_warnings->end());
  source_warnings->erase(std::unique(source_warnings->begin(), source_warnings->end()), source_warnings->end());
  warnings.insert(warnings.end(), source_warnings->begin(), source_warnings->end());
  print_warnings(err, warnings);

  emit_report(a.report, result.report, out);
  if (!result.complete) out << "run stopped after --max-tasks; resume with --resume\n";

  const bool all_backend_errors =
      !result.records.empty() && std::all_of(result.records.begin(), result.records.end(), [](const auto& r) {
        return r.failure && r.failure->starts_with("backend error");
      });
  if (all_backend_errors) {
    err << "every request failed: " << *result.records.front().failure << '\n';
    return kBackend;
  }
  return kOk;
}

// --- stats -------------------------------------------------------------------------------------

struct StatsArgs {
  std::string dataset;
  std::string format = "table";
  std::string plot;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.plot.empty()) check_outside(a.dataset, a.plot);
  const auto ds = dataset::load_dataset(a.dataset);
  print_warnings(err, ds.warnings);
  const auto stats = dataset::dataset_stats(ds);
  if (a.format == "table") {
    out << dataset::format_split_table(stats) << '\n' << dataset::format_action_table(stats);
  } else if (a.format == "csv") {
    out << "platform,train,validation,test,total\n";
    for (auto p : dataset::kAllPlatforms) {
      const auto i = static_cast<std::size_t>(p);
      out << dataset::display_name(p) << ',' << stats.counts[i][0] << ',' << stats.counts[i][1] << ','
          << stats.counts[i][2] << ',' << stats.platform_totals[i] << '\n';
    }
    out << "total," << stats.split_totals[0] << ',' << stats.split_totals[1] << ',' << stats.split_totals[2] << ','
        << stats.total << "\n\naction,count,percent\n";
    for (auto act : script::kAllActions)
      out << script::to_string(act) << ',' << stats.action_counts[static_cast<std::size_t>(act)] << ','
          << fixed(stats.action_percent(act), 2) << '\n';
  } else if (a.format == "json") {
    json platforms = json::object();
    for (auto p : dataset::kAllPlatforms) {
      const auto i = static_cast<std::size_t>(p);
      platforms[std::string(dataset::display_name(p))] = {{"train", stats.counts[i][0]},
                                                          {"validation", stats.counts[i][1]},
                                                          {"test", stats.counts[i][2]},
                                                          {"total", stats.platform_totals[i]}};
    }
    json actions = json::object();
    for (auto act : script::kAllActions)
      actions[std::string(script::to_string(act))] = {{"count", stats.action_counts[static_cast<std::size_t>(act)]},
                                                      {"percent", stats.action_percent(act)}};
    out << json{{"platforms", platforms},
                {"splits",
                 {{"train", stats.split_totals[0]},
                  {"validation", stats.split_totals[1]},
                  {"test", stats.split_totals[2]}}},
                {"total", stats.total},
                {"actions", actions},
                {"total_actions", stats.total_actions},
                {"unresolved_tasks", stats.unresolved_tasks}}
               .dump(2)
        << '\n';
  } else {
    throw ConfigError("unknown format \"" + a.format + "\" (json, csv, table)");
  }
  if (!a.plot.empty()) write_stats_plot(stats, a.plot);
  return kOk;
}

// --- make-fixture ----------------------------------------------------------------------------

struct FixtureArgs {
  std::string out;
  fixture::FixtureOptions options;
};

int cmd_make_fixture(const FixtureArgs& a, std::ostream& out) {
  if (fs::exists(a.out) && !fs::is_empty(a.out)) throw IoError(a.out + " exists and is not empty");
  const auto ds = fixture::write_fixture(a.out, a.options);
  out << "wrote " << ds.screens.size() << " screens and " << ds.tasks.size() << " tasks to " << a.out << '\n';
  return kOk;
}

// --- import ------------------------------------------------------------------------------------

struct ImportArgs {
  std::string source;
  std::string out;
};

// Only releases already in this toolkit's layout are understood; other
// layouts need a converter written against the actual release files.
int cmd_import(const ImportArgs& a, std::ostream& out) {
  if (!fs::is_regular_file(fs::path(a.source) / "manifest.json"))
    throw IoError("unrecognized release layout in " + a.source +
                  ": expected manifest.json with screens/ and tasks/ (see docs/dataset_schema.md)");
  if (fs::exists(a.out) && !fs::is_empty(a.out)) throw IoError(a.out + " exists and is not empty");
  const auto ds = dataset::load_dataset(a.source);
  dataset::save_dataset(ds, a.out);
  std::size_t copied = 0;
  for (const auto& s : ds.screens) {
    if (!fs::is_regular_file(s.image)) continue;
    fs::copy_file(s.image, fs::path(a.out) / "screens" / s.image.filename(), fs::copy_options::overwrite_existing);
    ++copied;
  }
  out << "imported " << ds.screens.size() << " screens (" << copied << " images) and " << ds.tasks.size()
      << " tasks\n";
  return kOk;
}

void add_report_options(CLI::App* cmd, ReportArgs& r) {
  cmd->add_option("--split", r.split, "train, validation or test")->capture_default_str();
  cmd->add_option("--format", r.format, "json, csv or table")->capture_default_str();
  cmd->add_option("--out", r.out, "Write the report here instead of stdout");
  cmd->add_option("--precision", r.precision, "Decimals in csv and table output")->capture_default_str();
  cmd->add_flag("--no-per-platform", r.no_per_platform, "Omit per-platform rows");
  cmd->add_option("--write-gate", r.write_gate, "positive (SeqScore > 0) or strict (SeqScore > 1)")
      ->capture_default_str();
  cmd->add_option("--normalization", r.normalization, "predicted or gold-max")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Benchmark toolkit for screenshot-grounded GUI automation agents", "actbench"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Check a dataset: schema, gold scripts, split integrity");
  validate->add_option("--dataset", validate_args.dataset, "Dataset root")->required();
  validate->add_option("--format", validate_args.format, "table or json")->capture_default_str();

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a predictions file against gold scripts");
  score->add_option("--dataset", score_args.dataset, "Dataset root")->required();
  score->add_option("--predictions", score_args.predictions, "NDJSON lines {\"task_id\", \"script\"}")->required();
  score->add_option("--label", score_args.label, "Report label (default: predictions file name)");
  add_report_options(score, score_args.report);

  ParseScreenArgs parse_args;
  auto* parse = app.add_subcommand("parse-screen", "Extract UI elements from a screenshot");
  parse->add_option("--image", parse_args.image, "Screenshot (PNG)")->required();
  parse->add_option("--task", parse_args.task, "Task text used by the relevance filter");
  parse->add_option("--backend-config", parse_args.backend_config, "Backend configuration JSON");
  parse->add_option("--out", parse_args.out, "Write the element list here instead of stdout");
  parse->add_flag("--no-filter", parse_args.no_filter, "Skip LLM filtering");

  RunArgs run_args;
  auto* runcmd = app.add_subcommand("run", "Run a few-shot baseline and score it");
  run_args.app = runcmd;
  runcmd->add_option("--dataset", run_args.dataset, "Dataset root")->required();
  runcmd->add_option("--backend-config", run_args.backend_config, "Backend configuration JSON");
  runcmd->add_option("--journal", run_args.journal, "Prediction journal (NDJSON)");
  runcmd->add_flag("--resume", run_args.resume, "Continue from the journal");
  runcmd->add_option("--max-tasks", run_args.max_tasks, "Stop after this many new predictions");
  runcmd->add_option("--token-budget", run_args.token_budget, "Prompt budget in estimated tokens");
  runcmd->add_option("--shots", run_args.shots, "In-context examples per prompt");
  runcmd->add_option("--parallelism", run_args.parallelism, "Concurrent backend requests");
  runcmd->add_option("--elements", run_args.elements, "Element source: screenparse, boxes or none");
  runcmd->add_flag("--no-filter", run_args.no_filter, "Skip LLM filtering of screen elements");
  add_report_options(runcmd, run_args.report);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Task counts by platform and split, action mix");
  stats->add_option("--dataset", stats_args.dataset, "Dataset root")->required();
  stats->add_option("--format", stats_args.format, "table, csv or json")->capture_default_str();
  stats->add_option("--plot", stats_args.plot, "Also write a bar chart PNG");

  FixtureArgs fixture_args;
  auto* make = app.add_subcommand("make-fixture", "Write a synthetic dataset");
  make->add_option("--out", fixture_args.out, "Output directory (new or empty)")->required();
  make->add_option("--tasks", fixture_args.options.tasks)->capture_default_str();
  make->add_option("--screens", fixture_args.options.screens)->capture_default_str();
  make->add_option("--seed", fixture_args.options.seed)->capture_default_str();
  make->add_flag("--inject-bad-syntax", fixture_args.options.inject_bad_syntax);
  make->add_flag("--inject-out-of-box", fixture_args.options.inject_out_of_box);
  make->add_flag("--inject-cross-split", fixture_args.options.inject_cross_split);

  ImportArgs import_args;
  auto* import = app.add_subcommand("import", "Copy a release into a fresh dataset directory");
  import->add_option("--source", import_args.source, "Release directory")->required();
  import->add_option("--out", import_args.out, "Output directory (new or empty)")->required();

  std::vector<const char*> argv = {"actbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigOrIo;
  }

  try {
    if (*validate) return cmd_validate(validate_args, out, err);
    if (*score) return cmd_score(score_args, out, err);
    if (*parse) return cmd_parse_screen(parse_args, out, err, env);
    if (*runcmd) return cmd_run(run_args, out, err, env);
    if (*stats) return cmd_stats(stats_args, out, err);
    if (*make) return cmd_make_fixture(fixture_args, out);
    if (*import) return cmd_import(import_args, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigOrIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrIo;
  } catch (const dataset::DatasetError& e) {
    err << e.what() << '\n';
    return kConfigOrIo;
  } catch (const harness::RunAborted& e) {
    err << "run aborted: " << e.what() << '\n';
    return kConfigOrIo;
  } catch (const screenparse::BackendUnavailable& e) {
    err << "backend unavailable: " << e.what() << '\n';
    return kBackend;
  } catch (const screenparse::DimensionMismatch& e) {
    err << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const screenparse::UnparsableResponse& e) {
    err << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const llm::ClientError& e) {
    err << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const harness::EmbedderUnavailable& e) {
    err << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrIo;
  }
  return kConfigOrIo;
}

}  // namespace actbench::cli
