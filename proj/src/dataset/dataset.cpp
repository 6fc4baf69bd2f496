#include "actbench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace actbench::dataset {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::array<std::pair<Platform, std::string_view>, 4> kPlatformNames = {{
    {Platform::kMacOS, "MacOS"}, {Platform::kLinux, "Linux"}, {Platform::kWindows, "Windows"}, {Platform::kWeb, "Web"}}};
constexpr std::array<std::pair<Split, std::string_view>, 3> kSplitNames = {
    {{Split::kTrain, "train"}, {Split::kValidation, "validation"}, {Split::kTest, "test"}}};
constexpr std::array<std::pair<BoxKind, std::string_view>, 6> kBoxKindNames = {{{BoxKind::kInteractable, "interactable"},
                                                                               {BoxKind::kBanner, "banner"},
                                                                               {BoxKind::kDropdown, "dropdown"},
                                                                               {BoxKind::kSubmit, "submit"},
                                                                               {BoxKind::kRadio, "radio"},
                                                                               {BoxKind::kOther, "other"}}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [e, name] : table)
    if (e == value) return name;
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> parse_enum(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string allowed(const std::array<std::pair<E, std::string_view>, N>& table) {
  std::string out;
  for (const auto& [e, name] : table) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Error>
json read_json(const fs::path& path) {
  if (!fs::exists(path))
    throw ManifestError(path, "",
                        path.filename() == "manifest.json" ? "no manifest" : "file listed in the manifest not found");
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw Error(path, "line " + std::to_string(line), "malformed JSON");
  }
}

// Field accessors that report the JSON pointer of the offending value.
class Fields {
 public:
  Fields(const json& object, fs::path file, std::string pointer)
      : object_(object), file_(std::move(file)), pointer_(std::move(pointer)) {
    if (!object_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw SchemaError(file_, key.empty() ? (pointer_.empty() ? "/" : pointer_) : pointer_ + "/" + key, message);
  }

  bool has(const std::string& key) const { return object_.contains(key) && !object_.at(key).is_null(); }

  std::string string(const std::string& key, bool non_empty = true) const {
    if (!has(key)) fail(key, "missing required field `" + key + "`");
    const auto& v = object_.at(key);
    if (!v.is_string()) fail(key, "`" + key + "` must be a string");
    auto s = v.get<std::string>();
    if (non_empty && s.empty()) fail(key, "`" + key + "` must be non-empty");
    return s;
  }

  int positive_int(const std::string& key) const {
    if (!has(key)) fail(key, "missing required field `" + key + "`");
    const auto& v = object_.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) fail(key, "`" + key + "` must be a positive integer");
    return v.get<int>();
  }

  const json& array(const std::string& key) const {
    if (!has(key)) fail(key, "missing required field `" + key + "`");
    const auto& v = object_.at(key);
    if (!v.is_array()) fail(key, "`" + key + "` must be an array");
    return v;
  }

  std::vector<std::string> strings(const std::string& key) const {
    std::vector<std::string> out;
    const auto& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(key + "/" + std::to_string(i), "expected a string");
      out.push_back(arr[i].get<std::string>());
    }
    return out;
  }

  const std::string& pointer() const { return pointer_; }
  const fs::path& file() const { return file_; }

 private:
  const json& object_;
  fs::path file_;
  std::string pointer_;
};

Screen parse_screen(const json& j, const fs::path& file, const fs::path& screens_dir) {
  Fields f(j, file, "");
  Screen screen;
  screen.id = f.string("id");
  const auto platform = f.string("platform");
  auto p = platform_from_string(platform);
  if (!p) f.fail("platform", "unknown platform `" + platform + "` (allowed: " + allowed(kPlatformNames) + ")");
  screen.platform = *p;
  screen.application = f.has("application") ? f.string("application", false) : std::string();
  screen.width = f.positive_int("width");
  screen.height = f.positive_int("height");
  screen.image = screens_dir / (f.has("image") ? f.string("image") : screen.id + ".png");

  const auto& boxes = f.array("boxes");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    Fields b(boxes[i], file, "/boxes/" + std::to_string(i));
    BoundingBox box;
    box.label = b.string("label");
    const auto kind = b.has("kind") ? b.string("kind") : std::string("interactable");
    auto k = parse_enum(kBoxKindNames, kind);
    if (!k) b.fail("kind", "unknown box kind `" + kind + "` (allowed: " + allowed(kBoxKindNames) + ")");
    box.kind = *k;
    const auto& rect = b.array("rect");
    if (rect.size() != 4 || !std::all_of(rect.begin(), rect.end(), [](const json& v) { return v.is_number(); }))
      b.fail("rect", "`rect` must be [x_min, y_min, x_max, y_max]");
    box.rect = Rect{rect[0].get<double>(), rect[1].get<double>(), rect[2].get<double>(), rect[3].get<double>()};
    if (!box.rect.valid()) b.fail("rect", "rect " + to_string(box.rect) + " has min > max");
    if (box.rect.x_min < 0 || box.rect.y_min < 0 || box.rect.x_max > screen.width || box.rect.y_max > screen.height)
      b.fail("rect", "rect " + to_string(box.rect) + " lies outside the " + std::to_string(screen.width) + "x" +
                         std::to_string(screen.height) + " screen");
    screen.boxes.push_back(std::move(box));
  }
  return screen;
}

TaskRecord parse_task(const json& j, const fs::path& file) {
  Fields f(j, file, "");
  TaskRecord task;
  task.id = f.string("id");
  task.screen_id = f.string("screen_id");
  task.task_text = f.string("task", false);
  task.rephrasings = f.has("rephrasings") ? f.strings("rephrasings") : std::vector<std::string>{};
  task.labeled_script = f.string("labeled_script", false);
  if (f.has("script")) task.script = f.string("script", false);
  const auto split = f.string("split");
  auto s = parse_enum(kSplitNames, split);
  if (!s) f.fail("split", "unknown split `" + split + "` (allowed: " + allowed(kSplitNames) + ")");
  task.split = *s;
  return task;
}

json screen_to_json(const Screen& screen) {
  json boxes = json::array();
  for (const auto& b : screen.boxes)
    boxes.push_back({{"label", b.label},
                     {"kind", to_string(b.kind)},
                     {"rect", {b.rect.x_min, b.rect.y_min, b.rect.x_max, b.rect.y_max}}});
  return {{"id", screen.id},
          {"image", screen.image.empty() ? screen.id + ".png" : screen.image.filename().string()},
          {"platform", to_string(screen.platform)},
          {"application", screen.application},
          {"width", screen.width},
          {"height", screen.height},
          {"boxes", boxes}};
}

json task_to_json(const TaskRecord& task) {
  json j = {{"id", task.id},
            {"screen_id", task.screen_id},
            {"task", task.task_text},
            {"rephrasings", task.rephrasings},
            {"labeled_script", task.labeled_script},
            {"split", to_string(task.split)}};
  if (task.script) j["script"] = *task.script;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string normalize_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c) != 0) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

RejectReason reason_for(script::ErrorKind kind) {
  switch (kind) {
    case script::ErrorKind::kSyntax: return RejectReason::kSyntaxError;
    case script::ErrorKind::kUnknownAction: return RejectReason::kUnknownAction;
    case script::ErrorKind::kArity: return RejectReason::kArityError;
  }
  return RejectReason::kSyntaxError;
}

}  // namespace

std::string_view to_string(Platform p) { return name_of(kPlatformNames, p); }
std::string_view to_string(Split s) { return name_of(kSplitNames, s); }
std::string_view to_string(BoxKind k) { return name_of(kBoxKindNames, k); }
std::optional<Platform> platform_from_string(std::string_view s) {
  if (auto p = parse_enum(kPlatformNames, s)) return p;
  for (auto p : kAllPlatforms)
    if (display_name(p) == s) return p;
  return std::nullopt;
}
std::optional<Split> split_from_string(std::string_view s) { return parse_enum(kSplitNames, s); }
std::optional<BoxKind> box_kind_from_string(std::string_view s) { return parse_enum(kBoxKindNames, s); }

std::string_view display_name(Platform p) {
  switch (p) {
    case Platform::kMacOS: return "Mac OS";
    case Platform::kLinux: return "Linux";
    case Platform::kWindows: return "Windows";
    case Platform::kWeb: return "Web";
  }
  return "?";
}

const Screen* Dataset::find_screen(std::string_view id) const {
  for (const auto& s : screens)
    if (s.id == id) return &s;
  return nullptr;
}

const Screen& Dataset::screen(std::string_view id) const {
  if (const auto* s = find_screen(id)) return *s;
  throw std::out_of_range("unknown screen id " + std::string(id));
}

DatasetError::DatasetError(std::string kind, fs::path file, std::string where, const std::string& message)
    : std::runtime_error(kind + ": " + file.string() + (where.empty() ? "" : " (" + where + ")") + ": " + message),
      kind_(std::move(kind)),
      file_(std::move(file)),
      where_(std::move(where)) {}

Dataset load_dataset(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  const json manifest = read_json<ManifestError>(manifest_path);
  if (!manifest.is_object()) throw ManifestError(manifest_path, "/", "manifest must be an object");

  Dataset ds;
  ds.root = root;
  std::vector<std::string> screen_ids, task_ids;
  try {
    Fields f(manifest, manifest_path, "");
    ds.name = f.string("name");
    ds.version = f.has("version") ? f.string("version") : std::string("0");
    screen_ids = f.strings("screens");
    task_ids = f.strings("tasks");
  } catch (const SchemaError& e) {
    throw ManifestError(manifest_path, e.where(), e.what());
  }

  for (const auto* ids : {&screen_ids, &task_ids}) {
    std::set<std::string> seen;
    for (const auto& id : *ids)
      if (!seen.insert(id).second)
        throw ManifestError(manifest_path, ids == &screen_ids ? "/screens" : "/tasks", "duplicate id `" + id + "`");
  }

  for (const auto& id : screen_ids) {
    const fs::path file = root / "screens" / (id + ".json");
    auto screen = parse_screen(read_json<SchemaError>(file), file, root / "screens");
    if (screen.id != id) throw SchemaError(file, "/id", "id `" + screen.id + "` does not match manifest entry `" + id + "`");
    if (!fs::exists(screen.image)) ds.warnings.push_back("screen " + id + ": image " + screen.image.string() + " not found");
    ds.screens.push_back(std::move(screen));
  }

  for (const auto& id : task_ids) {
    const fs::path file = root / "tasks" / (id + ".json");
    auto task = parse_task(read_json<SchemaError>(file), file);
    if (task.id != id) throw SchemaError(file, "/id", "id `" + task.id + "` does not match manifest entry `" + id + "`");
    const Screen* screen = ds.find_screen(task.screen_id);
    if (screen == nullptr)
      throw DanglingReference(file, "/screen_id", "screen `" + task.screen_id + "` is not in the manifest");
    for (const auto& label : placeholder_labels(task.labeled_script)) {
      bool found = std::any_of(screen->boxes.begin(), screen->boxes.end(),
                               [&](const BoundingBox& b) { return b.label == label; });
      if (!found)
        throw DanglingReference(file, "/labeled_script",
                                "label <" + label + "> has no box on screen `" + screen->id + "`");
    }
    ds.tasks.push_back(std::move(task));
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& root) {
  fs::create_directories(root / "screens");
  fs::create_directories(root / "tasks");
  json manifest = {{"name", dataset.name}, {"version", dataset.version}};
  manifest["screens"] = json::array();
  manifest["tasks"] = json::array();
  for (const auto& s : dataset.screens) {
    manifest["screens"].push_back(s.id);
    write_json(root / "screens" / (s.id + ".json"), screen_to_json(s));
  }
  for (const auto& t : dataset.tasks) {
    manifest["tasks"].push_back(t.id);
    write_json(root / "tasks" / (t.id + ".json"), task_to_json(t));
  }
  write_json(root / "manifest.json", manifest);
}

std::vector<std::string> placeholder_labels(std::string_view labeled_script) {
  std::vector<std::string> labels;
  int line_no = 0;
  std::istringstream in{std::string(labeled_script)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (script::is_skippable_line(line)) continue;
    try {
      auto call = script::parse_call(line, line_no, {.allow_placeholders = true});
      for (const auto& arg : call.args)
        if (const auto* p = std::get_if<script::Placeholder>(&arg)) labels.push_back(p->label);
    } catch (const script::ScriptError&) {
      // Syntax problems are reported by filter_records.
    }
  }
  return labels;
}

const BoundingBox& find_box(const Screen& screen, std::string_view label) {
  const BoundingBox* found = nullptr;
  for (const auto& box : screen.boxes) {
    if (box.label != label) continue;
    if (found != nullptr)
      throw AmbiguousLabel("label <" + std::string(label) + "> matches more than one box on screen " + screen.id);
    found = &box;
  }
  if (found == nullptr) throw UnknownLabel("label <" + std::string(label) + "> is not on screen " + screen.id);
  return *found;
}

MappedScript reverse_map_with_targets(std::string_view labeled_script, const Screen& screen) {
  MappedScript mapped;
  mapped.script.source_text = std::string(labeled_script);
  for (auto call : script::parse_calls(labeled_script, {.allow_placeholders = true})) {
    std::optional<std::string> target;
    std::vector<script::Argument> args;
    for (auto& arg : call.args) {
      if (const auto* p = std::get_if<script::Placeholder>(&arg)) {
        const auto center = pixel_center(find_box(screen, p->label).rect);
        args.emplace_back(script::NumberLiteral{center.x, false});
        args.emplace_back(script::NumberLiteral{center.y, false});
        target = p->label;
      } else {
        args.push_back(std::move(arg));
      }
    }
    call.args = std::move(args);
    mapped.script.actions.push_back(script::to_action(call));
    mapped.target_labels.push_back(std::move(target));
  }
  if (mapped.script.actions.empty()) throw script::SyntaxError(0, "script contains no statements");
  return mapped;
}

script::ActionScript reverse_map(std::string_view labeled_script, const Screen& screen) {
  return reverse_map_with_targets(labeled_script, screen).script;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kSyntaxError: return "SyntaxError";
    case RejectReason::kUnknownAction: return "UnknownAction";
    case RejectReason::kArityError: return "ArityError";
    case RejectReason::kUnknownLabel: return "UnknownLabel";
    case RejectReason::kAmbiguousLabel: return "AmbiguousLabel";
    case RejectReason::kScriptMismatch: return "ScriptMismatch";
    case RejectReason::kMissingTargetBox: return "MissingTargetBox";
    case RejectReason::kCoordinateOutsideBox: return "CoordinateOutsideBox";
    case RejectReason::kTooManyRephrasings: return "TooManyRephrasings";
    case RejectReason::kEmptyTask: return "EmptyTask";
  }
  return "?";
}

RecordRejected::RecordRejected(RejectReason reason, const std::string& message)
    : std::runtime_error(std::string(to_string(reason)) + ": " + message), reason_(reason) {}

GoldTask resolve_gold(const TaskRecord& task, const Screen& screen) {
  if (normalize_text(task.task_text).empty()) throw RecordRejected(RejectReason::kEmptyTask, "task text is empty");
  if (task.rephrasings.size() > kMaxRephrasings)
    throw RecordRejected(RejectReason::kTooManyRephrasings,
                         std::to_string(task.rephrasings.size()) + " rephrasings (at most 3)");

  MappedScript labeled;
  script::ActionScript numeric;
  try {
    labeled = reverse_map_with_targets(task.labeled_script, screen);
    numeric = task.script ? script::parse_script(*task.script) : labeled.script;
  } catch (const script::ScriptError& e) {
    throw RecordRejected(reason_for(e.kind()), e.what());
  } catch (const AmbiguousLabel& e) {
    throw RecordRejected(RejectReason::kAmbiguousLabel, e.what());
  } catch (const UnknownLabel& e) {
    throw RecordRejected(RejectReason::kUnknownLabel, e.what());
  }

  if (numeric.size() != labeled.script.size())
    throw RecordRejected(RejectReason::kScriptMismatch, "script has " + std::to_string(numeric.size()) +
                                                            " statements, labeled script has " +
                                                            std::to_string(labeled.script.size()));
  GoldTask gold;
  for (std::size_t j = 0; j < numeric.size(); ++j) {
    const auto& action = numeric.actions[j];
    if (action.name != labeled.script.actions[j].name)
      throw RecordRejected(RejectReason::kScriptMismatch,
                           "statement " + std::to_string(j + 1) + " differs between script and labeled script");
    std::optional<Rect> box;
    if (action.family() == script::ActionFamily::kMouse) {
      if (!labeled.target_labels[j])
        throw RecordRejected(RejectReason::kMissingTargetBox,
                             "statement " + std::to_string(j + 1) + " has no <label> target");
      box = find_box(screen, *labeled.target_labels[j]).rect;
      if (!box->contains(action.coordinate())) {
        std::ostringstream msg;
        msg << "statement " << j + 1 << " clicks (" << action.coordinate().x << ", " << action.coordinate().y
            << ") outside <" << *labeled.target_labels[j] << "> " << to_string(*box);
        throw RecordRejected(RejectReason::kCoordinateOutsideBox, msg.str());
      }
    }
    gold.actions.push_back(metrics::GoldAction::from_action(action, box));
  }
  gold.script = std::move(numeric);
  return gold;
}

FilterResult filter_records(const Dataset& dataset) {
  FilterResult result;
  result.kept.name = dataset.name;
  result.kept.version = dataset.version;
  result.kept.root = dataset.root;
  result.kept.screens = dataset.screens;
  result.kept.warnings = dataset.warnings;
  for (const auto& task : dataset.tasks) {
    const Screen* screen = dataset.find_screen(task.screen_id);
    if (screen == nullptr) {
      result.rejected.push_back({task.id, RejectReason::kUnknownLabel, "screen " + task.screen_id + " not found"});
      continue;
    }
    try {
      (void)resolve_gold(task, *screen);
      result.kept.tasks.push_back(task);
    } catch (const RecordRejected& e) {
      result.rejected.push_back({task.id, e.reason(), e.what()});
    }
  }
  return result;
}

std::string_view to_string(SplitViolation::Kind kind) {
  return kind == SplitViolation::Kind::kDuplicateAcrossSplits ? "DuplicateAcrossSplits" : "RephrasingAcrossSplits";
}

SplitVerdict check_split_integrity(const Dataset& dataset) {
  struct Occurrence {
    std::size_t task;
    bool primary;
  };
  std::map<std::string, std::vector<Occurrence>> by_text;
  for (std::size_t i = 0; i < dataset.tasks.size(); ++i) {
    const auto& t = dataset.tasks[i];
    by_text[normalize_text(t.task_text)].push_back({i, true});
    for (const auto& r : t.rephrasings) by_text[normalize_text(r)].push_back({i, false});
  }

  std::map<std::pair<std::size_t, std::size_t>, SplitViolation> pairs;
  for (const auto& [text, occurrences] : by_text) {
    if (text.empty()) continue;
    for (std::size_t a = 0; a < occurrences.size(); ++a) {
      for (std::size_t b = a + 1; b < occurrences.size(); ++b) {
        const auto& oa = occurrences[a];
        const auto& ob = occurrences[b];
        if (oa.task == ob.task) continue;
        const auto& ta = dataset.tasks[oa.task];
        const auto& tb = dataset.tasks[ob.task];
        if (ta.split == tb.split) continue;
        auto key = std::minmax(oa.task, ob.task);
        const auto kind = (oa.primary && ob.primary) ? SplitViolation::Kind::kDuplicateAcrossSplits
                                                     : SplitViolation::Kind::kRephrasingAcrossSplits;
        auto [it, inserted] = pairs.try_emplace(key, SplitViolation{kind, dataset.tasks[key.first].id,
                                                                    dataset.tasks[key.second].id, text});
        if (!inserted && kind == SplitViolation::Kind::kDuplicateAcrossSplits) it->second.kind = kind;
      }
    }
  }
  SplitVerdict verdict;
  for (auto& [key, violation] : pairs) verdict.violations.push_back(std::move(violation));
  return verdict;
}

double DatasetStats::split_percent(Split s) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(split_totals[static_cast<std::size_t>(s)]) / static_cast<double>(total);
}

double DatasetStats::action_percent(script::ActionName a) const {
  return total_actions == 0 ? 0.0
                            : 100.0 * static_cast<double>(action_counts[static_cast<std::size_t>(a)]) /
                                  static_cast<double>(total_actions);
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  for (const auto& task : dataset.tasks) {
    const Screen* screen = dataset.find_screen(task.screen_id);
    if (screen == nullptr) {
      ++stats.unresolved_tasks;
      continue;
    }
    const auto p = static_cast<std::size_t>(screen->platform);
    const auto s = static_cast<std::size_t>(task.split);
    ++stats.counts[p][s];
    ++stats.platform_totals[p];
    ++stats.split_totals[s];
    ++stats.total;

    // Action mix counts the executable script; label resolution is not needed.
    try {
      auto script = task.script ? script::parse_script(*task.script) : reverse_map(task.labeled_script, *screen);
      for (const auto& a : script.actions) {
        ++stats.action_counts[static_cast<std::size_t>(a.name)];
        ++stats.total_actions;
      }
    } catch (const std::exception&) {
      ++stats.unresolved_tasks;
    }
  }
  return stats;
}

std::string format_split_table(const DatasetStats& stats) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "Domain" << std::setw(10) << "Platform" << std::right << std::setw(8) << "Train"
     << std::setw(12) << "Validation" << std::setw(8) << "Test" << std::setw(8) << "Total" << '\n';
  for (auto p : kAllPlatforms) {
    const auto i = static_cast<std::size_t>(p);
    os << std::left << std::setw(10) << (p == Platform::kWeb ? "Web" : "Desktop") << std::setw(10)
       << (p == Platform::kWeb ? "-" : std::string(display_name(p))) << std::right << std::setw(8) << stats.counts[i][0]
       << std::setw(12) << stats.counts[i][1] << std::setw(8) << stats.counts[i][2] << std::setw(8)
       << stats.platform_totals[i] << '\n';
  }
  os << std::left << std::setw(20) << "Total" << std::right << std::setw(8) << stats.split_totals[0] << std::setw(12)
     << stats.split_totals[1] << std::setw(8) << stats.split_totals[2] << std::setw(8) << stats.total << '\n';
  os << std::left << std::setw(20) << "Share (%)" << std::right << std::fixed << std::setprecision(2) << std::setw(8)
     << stats.split_percent(Split::kTrain) << std::setw(12) << stats.split_percent(Split::kValidation) << std::setw(8)
     << stats.split_percent(Split::kTest) << '\n';
  return os.str();
}

std::string format_action_table(const DatasetStats& stats) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "Type" << std::setw(14) << "Action" << std::right << std::setw(10) << "Count"
     << std::setw(9) << "%" << '\n';
  os << std::fixed << std::setprecision(2);
  for (auto a : script::kAllActions) {
    const auto family = script::family_of(a);
    const bool keyboard = family == script::ActionFamily::kKey || family == script::ActionFamily::kWrite;
    os << std::left << std::setw(10) << (keyboard ? "Keyboard" : "Mouse") << std::setw(14) << script::to_string(a)
       << std::right << std::setw(10) << stats.action_counts[static_cast<std::size_t>(a)] << std::setw(9)
       << stats.action_percent(a) << '\n';
  }
  os << std::left << std::setw(24) << "Total" << std::right << std::setw(10) << stats.total_actions << '\n';
  return os.str();
}

}  // namespace actbench::dataset
