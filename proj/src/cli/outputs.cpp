#include <algorithm>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "actbench/cli.hpp"

namespace actbench::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::map<std::string, harness::PredictionRecord> read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read predictions " + path.string());
  std::map<std::string, harness::PredictionRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ConfigError(where + "not a JSON object");
    }
    if (!j.is_object() || !j.contains("task_id") || !j["task_id"].is_string())
      throw ConfigError(where + "expected {\"task_id\": string, \"script\": string|null}");
    harness::PredictionRecord r;
    r.task_id = j["task_id"].get<std::string>();
    r.backend = "predictions";
    const auto script = j.value("script", json());
    if (script.is_string()) {
      r.script = script.get<std::string>();
      r.raw_output = *r.script;
    } else if (script.is_null()) {
      r.failure = "no script";
    } else {
      throw ConfigError(where + "\"script\" must be a string or null");
    }
    out.insert_or_assign(r.task_id, std::move(r));
  }
  return out;
}

json screen_parse_to_json(const screenparse::ScreenParse& parse) {
  json elements = json::array();
  for (std::size_t i = 0; i < parse.elements.size(); ++i) {
    const auto& e = parse.elements[i];
    elements.push_back({{"id", screenparse::element_identifier(i, e)},
                        {"kind", std::string(screenparse::to_string(e.kind))},
                        {"label", e.label},
                        {"center", {e.center.x, e.center.y}},
                        {"rect", {e.rect.x_min, e.rect.y_min, e.rect.x_max, e.rect.y_max}},
                        {"confidence", e.confidence},
                        {"provenance", e.provenance}});
  }
  return {{"elements", elements}, {"warnings", parse.warnings}};
}

namespace {

void draw_bars(cv::Mat& canvas, cv::Rect area, const std::string& title, const std::vector<std::string>& labels,
               const std::vector<std::vector<double>>& series, const std::vector<cv::Scalar>& colors,
               const std::vector<std::string>& legend) {
  const cv::Scalar ink(40, 40, 40);
  cv::putText(canvas, title, {area.x, area.y + 18}, cv::FONT_HERSHEY_SIMPLEX, 0.55, ink, 1, cv::LINE_AA);
  const int top = area.y + 40, bottom = area.y + area.height - 40;
  const int left = area.x + 10, right = area.x + area.width - 10;
  cv::line(canvas, {left, bottom}, {right, bottom}, ink, 1);

  double peak = 0;
  for (const auto& s : series) for (double v : s) peak = std::max(peak, v);
  if (peak <= 0) peak = 1;

  const int groups = static_cast<int>(labels.size());
  const int group_w = (right - left) / std::max(groups, 1);
  const int bars = static_cast<int>(series.size());
  const int bar_w = std::max(2, (group_w - 10) / std::max(bars, 1));
  for (int g = 0; g < groups; ++g) {
    const int gx = left + g * group_w + 5;
    for (int b = 0; b < bars; ++b) {
      const int h = static_cast<int>((bottom - top) * series[b][g] / peak);
      cv::rectangle(canvas, cv::Rect(gx + b * bar_w, bottom - h, bar_w - 1, h), colors[b], cv::FILLED);
    }
    cv::putText(canvas, labels[g], {gx, bottom + 16}, cv::FONT_HERSHEY_SIMPLEX, 0.38, ink, 1, cv::LINE_AA);
  }
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const int lx = right - 110, ly = area.y + 10 + static_cast<int>(i) * 16;
    cv::rectangle(canvas, cv::Rect(lx, ly, 10, 10), colors[i], cv::FILLED);
    cv::putText(canvas, legend[i], {lx + 14, ly + 10}, cv::FONT_HERSHEY_SIMPLEX, 0.4, ink, 1, cv::LINE_AA);
  }
}

}  // namespace

void write_stats_plot(const dataset::DatasetStats& stats, const fs::path& png) {
  cv::Mat canvas(420, 1000, CV_8UC3, cv::Scalar(255, 255, 255));

  std::vector<std::string> platforms;
  std::vector<std::vector<double>> per_split(3);
  for (auto p : dataset::kAllPlatforms) {
    platforms.emplace_back(dataset::display_name(p));
    for (std::size_t s = 0; s < 3; ++s)
      per_split[s].push_back(static_cast<double>(stats.counts[static_cast<std::size_t>(p)][s]));
  }
  draw_bars(canvas, {0, 0, 420, 420}, "Tasks by platform and split", platforms, per_split,
            {cv::Scalar(180, 120, 40), cv::Scalar(60, 170, 240), cv::Scalar(80, 160, 80)},
            {"train", "validation", "test"});

  std::vector<std::string> actions;
  std::vector<std::vector<double>> share(1);
  for (auto a : script::kAllActions) {
    actions.emplace_back(script::to_string(a));
    share[0].push_back(stats.action_percent(a));
  }
  draw_bars(canvas, {420, 0, 580, 420}, "Action share (%)", actions, share, {cv::Scalar(150, 90, 160)}, {});

  if (png.has_parent_path()) fs::create_directories(png.parent_path());
  if (!cv::imwrite(png.string(), canvas)) throw ConfigError("cannot write plot " + png.string());
}

}  // namespace actbench::cli
