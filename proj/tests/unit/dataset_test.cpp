#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "actbench/dataset.hpp"

namespace fs = std::filesystem;
using namespace actbench;
using namespace actbench::dataset;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("actbench_ds_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

Screen search_screen() {
  Screen s;
  s.id = "s1";
  s.platform = Platform::kWeb;
  s.width = 400;
  s.height = 300;
  s.boxes = {{Rect{10, 10, 110, 40}, "search-bar", BoxKind::kInteractable},
             {Rect{120, 10, 160, 40}, "submit", BoxKind::kSubmit}};
  return s;
}

TaskRecord task(std::string id, std::string text, std::string labeled, Split split = Split::kTrain) {
  TaskRecord t;
  t.id = std::move(id);
  t.screen_id = "s1";
  t.task_text = std::move(text);
  t.labeled_script = std::move(labeled);
  t.split = split;
  return t;
}

Dataset two_screen_fixture() {
  Dataset ds;
  ds.name = "fixture";
  ds.version = "1";
  ds.screens.push_back(search_screen());
  Screen s2 = search_screen();
  s2.id = "s2";
  s2.platform = Platform::kLinux;
  ds.screens.push_back(s2);
  ds.tasks.push_back(task("t1", "Search for shoes", "pyautogui.click(<search-bar>)\npyautogui.write('shoes')"));
  auto t2 = task("t2", "Submit the form", "pyautogui.click(<submit>)", Split::kTest);
  t2.screen_id = "s2";
  t2.rephrasings = {"Press the submit button"};
  ds.tasks.push_back(t2);
  return ds;
}

}  // namespace

TEST(LoadDataset, TwoScreenFixture) {
  TempDir dir;
  save_dataset(two_screen_fixture(), dir.path());
  auto ds = load_dataset(dir.path());
  EXPECT_EQ(ds.screens.size(), 2u);
  EXPECT_EQ(ds.tasks.size(), 2u);
  EXPECT_EQ(ds.screen("s2").platform, Platform::kLinux);
  EXPECT_EQ(ds.tasks[1].rephrasings.size(), 1u);
  // No screenshots were written.
  EXPECT_EQ(ds.warnings.size(), 2u);
}

TEST(LoadDataset, SaveLoadRoundTrip) {
  TempDir dir;
  auto original = two_screen_fixture();
  original.tasks[0].script = "pyautogui.click(60, 25)\npyautogui.write('shoes')";
  save_dataset(original, dir.path());
  auto ds = load_dataset(dir.path());
  ASSERT_EQ(ds.tasks.size(), original.tasks.size());
  for (std::size_t i = 0; i < ds.tasks.size(); ++i) {
    EXPECT_EQ(ds.tasks[i].id, original.tasks[i].id);
    EXPECT_EQ(ds.tasks[i].labeled_script, original.tasks[i].labeled_script);
    EXPECT_EQ(ds.tasks[i].script, original.tasks[i].script);
    EXPECT_EQ(ds.tasks[i].split, original.tasks[i].split);
  }
  EXPECT_EQ(ds.screens[0].boxes[0].rect, (Rect{10, 10, 110, 40}));
}

TEST(LoadDataset, MissingScreenIsDangling) {
  TempDir dir;
  auto ds = two_screen_fixture();
  ds.tasks[0].screen_id = "nope";
  save_dataset(ds, dir.path());
  EXPECT_THROW(load_dataset(dir.path()), DanglingReference);
}

TEST(LoadDataset, UnresolvedLabelIsDangling) {
  TempDir dir;
  auto ds = two_screen_fixture();
  ds.tasks[0].labeled_script = "pyautogui.click(<cart>)";
  save_dataset(ds, dir.path());
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const DanglingReference& e) {
    EXPECT_EQ(e.where(), "/labeled_script");
  }
}

TEST(LoadDataset, DevSplitIsSchemaError) {
  TempDir dir;
  save_dataset(two_screen_fixture(), dir.path());
  const auto p = dir.path() / "tasks" / "t1.json";
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  text.replace(text.find("\"train\""), 7, "\"dev\"");
  write(p, text);
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "/split");
    EXPECT_EQ(e.file(), p);
  }
}

TEST(LoadDataset, MalformedJsonReportsLine) {
  TempDir dir;
  save_dataset(two_screen_fixture(), dir.path());
  write(dir.path() / "screens" / "s1.json", "{\n  \"id\": \"s1\",\n  oops\n}\n");
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "line 3");
  }
}

TEST(LoadDataset, ManifestProblems) {
  TempDir dir;
  EXPECT_THROW(load_dataset(dir.path()), ManifestError);
  write(dir.path() / "manifest.json", R"({"name": "x", "screens": ["a", "a"], "tasks": []})");
  EXPECT_THROW(load_dataset(dir.path()), ManifestError);
  write(dir.path() / "manifest.json", R"({"name": "x", "screens": 3, "tasks": []})");
  EXPECT_THROW(load_dataset(dir.path()), ManifestError);
}

TEST(LoadDataset, BoxOutsideScreenIsSchemaError) {
  TempDir dir;
  auto ds = two_screen_fixture();
  ds.screens[0].boxes[0].rect = Rect{10, 10, 500, 40};
  save_dataset(ds, dir.path());
  EXPECT_THROW(load_dataset(dir.path()), SchemaError);
}

TEST(LoadDataset, PlatformDisplayNameAccepted) {
  EXPECT_EQ(platform_from_string("Mac OS"), Platform::kMacOS);
  EXPECT_EQ(platform_from_string("MacOS"), Platform::kMacOS);
  EXPECT_EQ(platform_from_string("Android"), std::nullopt);
}

TEST(ReverseMap, SearchBarCenter) {
  auto s = reverse_map("pyautogui.click(<search-bar>)", search_screen());
  EXPECT_EQ(script::serialize_script(s), "pyautogui.click(60, 25)");
}

TEST(ReverseMap, UnknownLabel) {
  EXPECT_THROW(reverse_map("pyautogui.click(<cart>)", search_screen()), UnknownLabel);
}

TEST(ReverseMap, AmbiguousLabel) {
  auto screen = search_screen();
  screen.boxes.push_back({Rect{0, 100, 50, 150}, "search-bar", BoxKind::kInteractable});
  EXPECT_THROW(reverse_map("pyautogui.click(<search-bar>)", screen), AmbiguousLabel);
}

TEST(ReverseMap, CentersAlwaysInsideTheBox) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(0, 1000), extent(0, 300);
  for (int i = 0; i < 2000; ++i) {
    Screen screen;
    screen.id = "r";
    const double x0 = coord(rng), y0 = coord(rng);
    // Mix of integral and fractional corners, including zero-size boxes.
    const double x1 = x0 + extent(rng) + (i % 3 == 0 ? 0.5 : 0.0);
    const double y1 = y0 + (i % 7 == 0 ? 0 : extent(rng));
    screen.boxes.push_back({Rect{x0, y0, x1, y1}, "b", BoxKind::kOther});
    auto s = reverse_map("pyautogui.doubleClick(<b>)", screen);
    ASSERT_TRUE(screen.boxes[0].rect.contains(s.actions[0].coordinate())) << to_string(screen.boxes[0].rect);
    ASSERT_NO_THROW(script::parse_script(script::serialize_script(s)));
  }
}

TEST(ResolveGold, PayloadsFollowTheScript) {
  auto gold = resolve_gold(task("t", "search", "pyautogui.click(<search-bar>)\npyautogui.write('shoes')\n"
                                               "pyautogui.press('enter')"),
                           search_screen());
  ASSERT_EQ(gold.actions.size(), 3u);
  EXPECT_EQ(gold.actions[0].target_box, (Rect{10, 10, 110, 40}));
  EXPECT_EQ(gold.actions[1].gold_text, "shoes");
  EXPECT_EQ(gold.actions[2].gold_keys, script::KeyList{"enter"});
}

TEST(ResolveGold, ExplicitScriptMayClickOffCenter) {
  auto t = task("t", "search", "pyautogui.click(<search-bar>)");
  t.script = "pyautogui.click(12, 38)";
  auto gold = resolve_gold(t, search_screen());
  EXPECT_EQ(gold.script.actions[0].coordinate(), (script::Coordinate{12, 38}));
}

namespace {

RejectReason rejection_of(const TaskRecord& t) {
  try {
    resolve_gold(t, search_screen());
  } catch (const RecordRejected& e) {
    return e.reason();
  }
  ADD_FAILURE() << "record " << t.id << " was accepted";
  return RejectReason::kEmptyTask;
}

}  // namespace

TEST(FilterRecords, RejectionReasons) {
  EXPECT_EQ(rejection_of(task("a", "x", "pyautogui.click(<search-bar>")), RejectReason::kSyntaxError);
  EXPECT_EQ(rejection_of(task("b", "x", "pyautogui.tap(<search-bar>)")), RejectReason::kUnknownAction);
  EXPECT_EQ(rejection_of(task("c", "x", "pyautogui.press()")), RejectReason::kArityError);
  EXPECT_EQ(rejection_of(task("d", "x", "pyautogui.click(<cart>)")), RejectReason::kUnknownLabel);
  EXPECT_EQ(rejection_of(task("e", "x", "pyautogui.click(5, 5)")), RejectReason::kMissingTargetBox);
  EXPECT_EQ(rejection_of(task("f", "  ", "pyautogui.press('a')")), RejectReason::kEmptyTask);

  auto outside = task("g", "x", "pyautogui.click(<search-bar>)");
  outside.script = "pyautogui.click(300, 25)";
  EXPECT_EQ(rejection_of(outside), RejectReason::kCoordinateOutsideBox);

  auto mismatch = task("h", "x", "pyautogui.click(<search-bar>)");
  mismatch.script = "pyautogui.rightClick(60, 25)";
  EXPECT_EQ(rejection_of(mismatch), RejectReason::kScriptMismatch);

  auto chatty = task("i", "x", "pyautogui.press('a')");
  chatty.rephrasings = {"a", "b", "c", "d"};
  EXPECT_EQ(rejection_of(chatty), RejectReason::kTooManyRephrasings);

  auto ambiguous_screen = search_screen();
  ambiguous_screen.boxes.push_back(ambiguous_screen.boxes[1]);
  EXPECT_THROW(resolve_gold(task("j", "x", "pyautogui.click(<submit>)"), ambiguous_screen), RecordRejected);
}

TEST(FilterRecords, KeepsValidAndIsIdempotent) {
  auto ds = two_screen_fixture();
  ds.tasks.push_back(task("bad", "broken", "pyautogui.click(<search-bar>"));
  auto first = filter_records(ds);
  ASSERT_EQ(first.rejected.size(), 1u);
  EXPECT_EQ(first.rejected[0].task_id, "bad");
  EXPECT_EQ(first.rejected[0].reason, RejectReason::kSyntaxError);
  EXPECT_EQ(first.kept.tasks.size(), 2u);
  auto second = filter_records(first.kept);
  EXPECT_TRUE(second.rejected.empty());
  EXPECT_EQ(second.kept.tasks.size(), 2u);
}

TEST(SplitIntegrity, CleanFixture) { EXPECT_TRUE(check_split_integrity(two_screen_fixture()).ok()); }

TEST(SplitIntegrity, RephrasingInAnotherSplit) {
  auto ds = two_screen_fixture();
  ds.tasks.push_back(task("t3", "press the SUBMIT   button", "pyautogui.click(<submit>)", Split::kTrain));
  auto v = check_split_integrity(ds);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].kind, SplitViolation::Kind::kRephrasingAcrossSplits);
  EXPECT_EQ(v.violations[0].task_a, "t2");
  EXPECT_EQ(v.violations[0].task_b, "t3");
}

TEST(SplitIntegrity, DuplicateTaskText) {
  auto ds = two_screen_fixture();
  ds.tasks.push_back(task("t3", "Search for shoes", "pyautogui.click(<search-bar>)", Split::kValidation));
  auto v = check_split_integrity(ds);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].kind, SplitViolation::Kind::kDuplicateAcrossSplits);
}

TEST(SplitIntegrity, SameSplitDuplicatesAreFine) {
  auto ds = two_screen_fixture();
  ds.tasks.push_back(task("t3", "Search for shoes", "pyautogui.click(<search-bar>)", Split::kTrain));
  EXPECT_TRUE(check_split_integrity(ds).ok());
}

TEST(DatasetStats, EmptyDatasetIsAllZero) {
  auto stats = dataset_stats(Dataset{});
  EXPECT_EQ(stats.total, 0u);
  EXPECT_EQ(stats.total_actions, 0u);
  for (auto s : kAllSplits) EXPECT_EQ(stats.split_percent(s), 0.0);
  EXPECT_NE(format_split_table(stats).find("Mac OS"), std::string::npos);
}

TEST(DatasetStats, CountsAndPercentages) {
  auto stats = dataset_stats(two_screen_fixture());
  EXPECT_EQ(stats.total, 2u);
  EXPECT_EQ(stats.counts[static_cast<int>(Platform::kWeb)][0], 1u);
  EXPECT_EQ(stats.counts[static_cast<int>(Platform::kLinux)][2], 1u);
  EXPECT_EQ(stats.total_actions, 3u);
  double sum = 0;
  for (auto a : script::kAllActions) sum += stats.action_percent(a);
  EXPECT_NEAR(sum, 100.0, 0.01);
  EXPECT_NEAR(stats.action_percent(script::ActionName::kClick), 200.0 / 3.0, 1e-9);
  EXPECT_NE(format_action_table(stats).find("66.67"), std::string::npos);
}
