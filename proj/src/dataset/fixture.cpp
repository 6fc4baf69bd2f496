#include "actbench/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace actbench::fixture {

using dataset::BoundingBox;
using dataset::BoxKind;
using dataset::Dataset;
using dataset::Platform;
using dataset::Screen;
using dataset::Split;
using dataset::TaskRecord;

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;

struct App {
  const char* name;
  Platform platform;
  std::vector<const char*> buttons;
};

const std::vector<App>& apps() {
  static const std::vector<App> kApps = {
      {"Finder", Platform::kMacOS, {"new-folder-button", "back-button", "share-button", "tags-button"}},
      {"Nautilus", Platform::kLinux, {"home-button", "trash-button", "new-tab-button", "properties-button"}},
      {"Explorer", Platform::kWindows, {"copy-button", "paste-button", "rename-button", "delete-button"}},
      {"Storefront", Platform::kWeb, {"cart-button", "wishlist-button", "account-button", "help-button"}},
      {"Mail", Platform::kMacOS, {"compose-button", "reply-button", "archive-button", "flag-button"}},
      {"Terminal", Platform::kLinux, {"new-window-button", "split-button", "copy-output-button", "clear-button"}},
      {"Settings", Platform::kWindows, {"apply-button", "reset-button", "bluetooth-button", "display-button"}},
      {"News", Platform::kWeb, {"subscribe-button", "login-button", "share-article-button", "comments-button"}},
  };
  return kApps;
}

const std::vector<const char*> kQueries = {"running shoes", "quarterly report", "weather tomorrow", "flight to Paris",
                                           "budget.xlsx",   "meeting notes",    "hiking boots",     "python tutorial",
                                           "invoice 2041",  "holiday photos",   "jazz playlist",    "train times"};

// Portable draws: std distributions differ between standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 rng_;
};

std::string readable(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), '-', ' ');
  return out;
}

Screen make_screen(std::size_t index, Draw& draw) {
  const App& app = apps()[index % apps().size()];
  Screen s;
  char id[16];
  std::snprintf(id, sizeof id, "s%02zu", index + 1);
  s.id = id;
  s.platform = app.platform;
  s.application = app.name;
  s.width = kWidth;
  s.height = kHeight;
  s.image = s.id + ".png";

  s.boxes.push_back({Rect{0, 0, kWidth, 40}, "title-bar", BoxKind::kBanner});
  const int sx = draw.between(20, 60);
  s.boxes.push_back({Rect{double(sx), 60, double(sx + draw.between(320, 420)), 96}, "search-bar", BoxKind::kInteractable});
  s.boxes.push_back({Rect{600, 60, 700, 96}, "submit-button", BoxKind::kSubmit});
  s.boxes.push_back({Rect{40, 130, 240, 166}, "sort-dropdown", BoxKind::kDropdown});
  s.boxes.push_back({Rect{300, 130, 460, 166}, "dark-mode-radio", BoxKind::kRadio});
  for (std::size_t b = 0; b < app.buttons.size(); ++b) {
    const double x0 = 40 + 180.0 * double(b);
    const double y0 = 220 + draw.between(0, 20);
    s.boxes.push_back({Rect{x0, y0, x0 + 150, y0 + 40}, app.buttons[b], BoxKind::kInteractable});
  }
  s.boxes.push_back({Rect{40, 320, 760, 470}, "content-panel", BoxKind::kOther});
  return s;
}

struct Draft {
  std::string text;
  std::vector<std::string> rephrasings;
  std::string labeled;
};

std::string click_line(const char* fn, const std::string& label) {
  return std::string("pyautogui.") + fn + "(<" + label + ">)";
}

Draft draft_task(const Screen& screen, std::size_t pattern, Draw& draw) {
  const std::string app = screen.application;
  std::vector<std::string> buttons;
  for (const auto& b : screen.boxes)
    if (b.label.ends_with("-button") && b.label != "submit-button") buttons.push_back(b.label);
  const std::string button = draw.pick(buttons);
  const std::string what = readable(button);
  const std::string mod = screen.platform == Platform::kMacOS ? "command" : "ctrl";

  switch (pattern % 11) {
    case 0:
      return {"Click the " + what + " in " + app,
              {"Press the " + what + " in " + app, "Select " + what + " on the " + app + " window"},
              click_line("click", button)};
    case 1: {
      const std::string q = draw.pick(kQueries);
      return {"Search for " + q + " in " + app,
              {"Look up " + q + " using the " + app + " search bar", "Find " + q + " in " + app},
              click_line("click", "search-bar") + "\npyautogui.write('" + q + "')\npyautogui.press('enter')"};
    }
    case 2:
      return {"Open the " + what + " in " + app, {"Double click the " + what + " in " + app},
              click_line("doubleClick", button)};
    case 3:
      return {"Show the context menu of the " + what + " in " + app,
              {"Right click the " + what + " in " + app},
              click_line("rightClick", button)};
    case 4:
      return {"Hover over the " + what + " in " + app, {"Move the pointer onto the " + what + " in " + app},
              click_line("moveTo", button)};
    case 5:
      return {"Drag the " + what + " into the content panel of " + app,
              {"Move the " + what + " to the " + app + " content panel by dragging"},
              click_line("moveTo", button) + "\n" + click_line("dragTo", "content-panel")};
    case 6:
      return {"Save the current work in " + app + " with the keyboard",
              {"Use the save shortcut in " + app},
              "pyautogui.hotkey('" + mod + "', 's')"};
    case 7: {
      const int n = draw.between(2, 9);
      return {"Scroll down " + std::to_string(n) + " notches in " + app,
              {"Scroll the " + app + " view down by " + std::to_string(n)},
              "pyautogui.scroll(-" + std::to_string(n) + ")"};
    }
    case 8: {
      const int n = draw.between(2, 9);
      return {"Scroll right " + std::to_string(n) + " notches in " + app,
              {"Move the " + app + " view " + std::to_string(n) + " steps to the right"},
              "pyautogui.hscroll(" + std::to_string(n) + ")"};
    }
    case 9:
      return {"Close the open dialog in " + app, {"Dismiss the " + app + " dialog"}, "pyautogui.press('esc')"};
    default:
      return {"Sort the " + app + " items by the next option",
              {"Pick the next sort order in " + app},
              click_line("click", "sort-dropdown") + "\npyautogui.press('down')\npyautogui.press('enter')"};
  }
}

std::string normalized(const std::string& text) {
  std::string out;
  for (unsigned char c : text) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

// Explicit numeric script clicking a random in-box point for each target.
std::string jittered_script(const TaskRecord& task, const Screen& screen, Draw& draw) {
  auto mapped = dataset::reverse_map_with_targets(task.labeled_script, screen);
  for (std::size_t j = 0; j < mapped.script.size(); ++j) {
    auto& a = mapped.script.actions[j];
    if (!mapped.target_labels[j]) continue;
    const Rect r = dataset::find_box(screen, *mapped.target_labels[j]).rect;
    a.args = script::Coordinate{std::floor(r.x_min) + draw.between(1, int(r.width()) - 1),
                                std::floor(r.y_min) + draw.between(1, int(r.height()) - 1)};
  }
  return script::serialize_script(mapped.script);
}

const BoundingBox* first_target(const TaskRecord& task, const Screen& screen) {
  auto mapped = dataset::reverse_map_with_targets(task.labeled_script, screen);
  for (const auto& label : mapped.target_labels)
    if (label) return &dataset::find_box(screen, *label);
  return nullptr;
}

}  // namespace

Dataset make_fixture(const FixtureOptions& options) {
  Draw draw(options.seed);
  Dataset ds;
  ds.name = "synthetic-fixture";
  ds.version = "1";
  const std::size_t n_screens = std::max<std::size_t>(1, options.screens);
  for (std::size_t i = 0; i < n_screens; ++i) ds.screens.push_back(make_screen(i, draw));

  const std::size_t n = options.tasks;
  const auto n_train = static_cast<std::size_t>(std::lround(0.7 * double(n)));
  const auto n_val = static_cast<std::size_t>(std::lround(0.1 * double(n)));
  std::vector<Split> splits(n, Split::kTest);
  std::fill_n(splits.begin(), n_train, Split::kTrain);
  std::fill_n(splits.begin() + long(n_train), std::min(n_val, n - n_train), Split::kValidation);
  draw.shuffle(splits);

  std::set<std::string> used;
  for (std::size_t i = 0; i < n; ++i) {
    const Screen& screen = ds.screens[i % n_screens];
    Draft d = draft_task(screen, i, draw);
    if (used.contains(normalized(d.text))) d.text += " (take " + std::to_string(i + 1) + ")";
    used.insert(normalized(d.text));
    std::vector<std::string> rephrasings;
    for (auto& r : d.rephrasings) {
      if (used.contains(normalized(r))) r += " (take " + std::to_string(i + 1) + ")";
      if (used.insert(normalized(r)).second) rephrasings.push_back(r);
    }

    TaskRecord t;
    char id[16];
    std::snprintf(id, sizeof id, "t%03zu", i + 1);
    t.id = id;
    t.screen_id = screen.id;
    t.task_text = d.text;
    t.rephrasings = std::move(rephrasings);
    t.labeled_script = d.labeled;
    t.split = splits[i];
    if (draw.below(3) == 0 && first_target(t, screen) != nullptr) t.script = jittered_script(t, screen, draw);
    ds.tasks.push_back(std::move(t));
  }

  // Injections go to distinct records so each yields one finding.
  std::set<std::size_t> touched;
  auto take = [&](auto&& predicate) -> TaskRecord* {
    for (std::size_t i = 0; i < ds.tasks.size(); ++i)
      if (!touched.contains(i) && predicate(ds.tasks[i])) {
        touched.insert(i);
        return &ds.tasks[i];
      }
    return nullptr;
  };
  auto screen_of = [&](const TaskRecord& t) -> const Screen& { return ds.screen(t.screen_id); };

  if (options.inject_cross_split) {
    TaskRecord* a = take([](const TaskRecord& t) { return t.split == Split::kTrain; });
    TaskRecord* b = take([&](const TaskRecord& t) { return a && t.split != a->split; });
    if (a && b) {
      if (b->rephrasings.size() >= dataset::kMaxRephrasings) b->rephrasings.pop_back();
      b->rephrasings.push_back(a->task_text);
    }
  }
  if (options.inject_bad_syntax) {
    if (TaskRecord* t = take([](const TaskRecord&) { return true; })) {
      t->labeled_script.pop_back();  // drop the closing parenthesis
      t->script.reset();
    }
  }
  if (options.inject_out_of_box) {
    if (TaskRecord* t = take([&](const TaskRecord& r) { return first_target(r, screen_of(r)) != nullptr; })) {
      const Screen& screen = screen_of(*t);
      const Rect box = first_target(*t, screen)->rect;
      auto mapped = dataset::reverse_map_with_targets(t->labeled_script, screen);
      for (std::size_t j = 0; j < mapped.script.size(); ++j) {
        if (!mapped.target_labels[j]) continue;
        const double x = box.x_max + 12 <= screen.width ? box.x_max + 12 : box.x_min - 12;
        mapped.script.actions[j].args = script::Coordinate{x, std::round((box.y_min + box.y_max) / 2)};
        break;
      }
      t->script = script::serialize_script(mapped.script);
    }
  }
  return ds;
}

cv::Mat render_screen(const Screen& screen) {
  cv::Mat img(screen.height, screen.width, CV_8UC3, cv::Scalar(250, 250, 250));
  const auto font = cv::FONT_HERSHEY_SIMPLEX;
  auto centered_text = [&](const Rect& r, const std::string& text, const cv::Scalar& color) {
    int baseline = 0;
    const auto size = cv::getTextSize(text, font, 0.5, 1, &baseline);
    const cv::Point org(int(r.x_min + (r.width() - size.width) / 2), int(r.y_min + (r.height() + size.height) / 2));
    cv::putText(img, text, org, font, 0.5, color, 1, cv::LINE_AA);
  };

  for (const auto& box : screen.boxes) {
    const cv::Rect r(int(box.rect.x_min), int(box.rect.y_min), int(box.rect.width()), int(box.rect.height()));
    const std::string text = readable(box.label);
    switch (box.kind) {
      case BoxKind::kBanner:
        cv::rectangle(img, r, cv::Scalar(70, 60, 50), cv::FILLED);
        centered_text(box.rect, screen.application, cv::Scalar(255, 255, 255));
        break;
      case BoxKind::kSubmit:
        cv::rectangle(img, r, cv::Scalar(200, 120, 30), cv::FILLED);
        centered_text(box.rect, "Submit", cv::Scalar(255, 255, 255));
        break;
      case BoxKind::kDropdown:
        cv::rectangle(img, r, cv::Scalar(120, 120, 120), 1);
        centered_text(box.rect, "Sort by", cv::Scalar(40, 40, 40));
        cv::fillConvexPoly(img,
                           std::vector<cv::Point>{{r.x + r.width - 24, r.y + 14},
                                                  {r.x + r.width - 10, r.y + 14},
                                                  {r.x + r.width - 17, r.y + 24}},
                           cv::Scalar(60, 60, 60));
        break;
      case BoxKind::kRadio:
        cv::circle(img, {r.x + 16, r.y + r.height / 2}, 8, cv::Scalar(60, 60, 60), 2, cv::LINE_AA);
        centered_text(box.rect, "Dark mode", cv::Scalar(40, 40, 40));
        break;
      case BoxKind::kOther:
        cv::rectangle(img, r, cv::Scalar(230, 230, 230), cv::FILLED);
        break;
      case BoxKind::kInteractable:
        if (box.label == "search-bar") {
          cv::rectangle(img, r, cv::Scalar(255, 255, 255), cv::FILLED);
          cv::rectangle(img, r, cv::Scalar(150, 150, 150), 1);
          centered_text(box.rect, "Search", cv::Scalar(150, 150, 150));
        } else {
          cv::rectangle(img, r, cv::Scalar(215, 215, 215), cv::FILLED);
          centered_text(box.rect, text.substr(0, text.size() - 7), cv::Scalar(30, 30, 30));
        }
        break;
    }
  }
  return img;
}

Dataset write_fixture(const std::filesystem::path& root, const FixtureOptions& options) {
  Dataset ds = make_fixture(options);
  dataset::save_dataset(ds, root);
  for (auto& screen : ds.screens) {
    screen.image = root / "screens" / (screen.id + ".png");
    cv::imwrite(screen.image.string(), render_screen(screen));
  }
  ds.root = root;
  return ds;
}

}  // namespace actbench::fixture
