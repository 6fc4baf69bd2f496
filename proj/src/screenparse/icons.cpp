#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "actbench/screenparse.hpp"

namespace actbench::screenparse {

namespace fs = std::filesystem;
using json = nlohmann::json;

IconLibrary load_icon_library(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  std::ifstream in(index_path);
  if (!in) throw std::runtime_error("icon library index not found: " + index_path.string());
  json index;
  try {
    index = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed " + index_path.string() + ": " + e.what());
  }
  if (!index.is_object()) throw std::runtime_error(index_path.string() + ": expected {\"file\": \"name\"}");

  IconLibrary library;
  std::set<std::string> names;
  for (const auto& [file, name] : index.items()) {
    if (!name.is_string() || name.get<std::string>().empty())
      throw std::runtime_error(index_path.string() + ": entry " + file + " needs a functionality name");
    cv::Mat img = cv::imread((dir / file).string(), cv::IMREAD_GRAYSCALE);
    if (img.empty()) throw std::runtime_error("cannot read icon " + (dir / file).string());
    if (!names.insert(name.get<std::string>()).second)
      throw std::runtime_error(index_path.string() + ": duplicate icon name " + name.get<std::string>());
    library.push_back({name.get<std::string>(), img});
  }
  return library;
}

void save_icon_library(const IconLibrary& library, const fs::path& dir) {
  fs::create_directories(dir);
  json index = json::object();
  for (const auto& icon : library) {
    const std::string file = icon.name + ".png";
    cv::imwrite((dir / file).string(), icon.image);
    index[file] = icon.name;
  }
  std::ofstream(dir / "index.json") << index.dump(2) << '\n';
}

namespace {

using Painter = std::function<void(cv::Mat&, double)>;

const cv::Scalar kInk(30);

cv::Point P(double s, double x, double y) { return {int(std::lround(x * s)), int(std::lround(y * s))}; }

void line(cv::Mat& m, double s, double x0, double y0, double x1, double y1, int t = 3) {
  cv::line(m, P(s, x0, y0), P(s, x1, y1), kInk, t, cv::LINE_AA);
}
void rect(cv::Mat& m, double s, double x0, double y0, double x1, double y1, int t = 3) {
  cv::rectangle(m, P(s, x0, y0), P(s, x1, y1), kInk, t, cv::LINE_AA);
}
void circle(cv::Mat& m, double s, double x, double y, double r, int t = 3) {
  cv::circle(m, P(s, x, y), int(std::lround(r * s)), kInk, t, cv::LINE_AA);
}
void poly(cv::Mat& m, double s, std::vector<std::pair<double, double>> pts, bool fill, bool closed = true) {
  std::vector<cv::Point> p;
  for (auto [x, y] : pts) p.push_back(P(s, x, y));
  if (fill) cv::fillPoly(m, std::vector<std::vector<cv::Point>>{p}, kInk, cv::LINE_AA);
  else cv::polylines(m, std::vector<std::vector<cv::Point>>{p}, closed, kInk, 3, cv::LINE_AA);
}

// Coordinates on a 48-unit canvas, scaled by s = size / 48.
const std::vector<std::pair<const char*, Painter>>& painters() {
  static const std::vector<std::pair<const char*, Painter>> kPainters = {
      {"calendar",
       [](cv::Mat& m, double s) {
         rect(m, s, 8, 11, 40, 40);
         line(m, s, 8, 19, 40, 19);
         line(m, s, 16, 6, 16, 14);
         line(m, s, 32, 6, 32, 14);
         for (int r = 0; r < 2; ++r)
           for (int c = 0; c < 3; ++c) cv::rectangle(m, P(s, 13 + 9 * c, 24 + 8 * r), P(s, 17 + 9 * c, 28 + 8 * r), kInk, -1);
       }},
      {"search",
       [](cv::Mat& m, double s) {
         circle(m, s, 20, 20, 11);
         line(m, s, 28, 28, 40, 40, 5);
       }},
      {"home",
       [](cv::Mat& m, double s) {
         poly(m, s, {{6, 24}, {24, 8}, {42, 24}}, false, false);
         rect(m, s, 12, 22, 36, 40);
         cv::rectangle(m, P(s, 21, 29), P(s, 27, 40), kInk, -1);
       }},
      {"trash",
       [](cv::Mat& m, double s) {
         line(m, s, 9, 12, 39, 12);
         rect(m, s, 19, 6, 29, 12, 2);
         poly(m, s, {{12, 14}, {36, 14}, {33, 42}, {15, 42}}, false);
         line(m, s, 20, 19, 20, 37, 2);
         line(m, s, 28, 19, 28, 37, 2);
       }},
      {"settings",
       [](cv::Mat& m, double s) {
         circle(m, s, 24, 24, 10, 5);
         circle(m, s, 24, 24, 3, -1);
         for (int k = 0; k < 8; ++k) {
           const double a = k * CV_PI / 4;
           line(m, s, 24 + 12 * std::cos(a), 24 + 12 * std::sin(a), 24 + 18 * std::cos(a), 24 + 18 * std::sin(a), 5);
         }
       }},
      {"mail",
       [](cv::Mat& m, double s) {
         rect(m, s, 6, 12, 42, 36);
         poly(m, s, {{6, 12}, {24, 26}, {42, 12}}, false, false);
       }},
      {"user",
       [](cv::Mat& m, double s) {
         circle(m, s, 24, 16, 8, -1);
         cv::ellipse(m, P(s, 24, 42), cv::Size(int(15 * s), int(13 * s)), 0, 180, 360, kInk, -1, cv::LINE_AA);
       }},
      {"lock",
       [](cv::Mat& m, double s) {
         cv::rectangle(m, P(s, 10, 22), P(s, 38, 42), kInk, -1);
         cv::ellipse(m, P(s, 24, 22), cv::Size(int(9 * s), int(11 * s)), 0, 180, 360, kInk, 3, cv::LINE_AA);
         circle(m, s, 24, 31, 3, -1);
       }},
      {"star",
       [](cv::Mat& m, double s) {
         std::vector<std::pair<double, double>> pts;
         for (int k = 0; k < 10; ++k) {
           const double a = -CV_PI / 2 + k * CV_PI / 5;
           const double r = k % 2 == 0 ? 19 : 8;
           pts.emplace_back(24 + r * std::cos(a), 26 + r * std::sin(a));
         }
         poly(m, s, pts, true);
       }},
      {"heart",
       [](cv::Mat& m, double s) {
         circle(m, s, 16, 18, 9, -1);
         circle(m, s, 32, 18, 9, -1);
         poly(m, s, {{8, 22}, {40, 22}, {24, 40}}, true);
       }},
      {"bell",
       [](cv::Mat& m, double s) {
         poly(m, s, {{24, 8}, {34, 14}, {35, 32}, {40, 36}, {8, 36}, {13, 32}, {14, 14}}, false);
         circle(m, s, 24, 40, 3, -1);
       }},
      {"cart",
       [](cv::Mat& m, double s) {
         poly(m, s, {{4, 8}, {11, 8}, {16, 30}, {38, 30}, {42, 14}, {13, 14}}, false, false);
         circle(m, s, 18, 38, 3, -1);
         circle(m, s, 35, 38, 3, -1);
       }},
      {"download",
       [](cv::Mat& m, double s) {
         line(m, s, 24, 6, 24, 30, 4);
         poly(m, s, {{14, 22}, {24, 32}, {34, 22}}, false, false);
         line(m, s, 8, 40, 40, 40, 4);
       }},
      {"upload",
       [](cv::Mat& m, double s) {
         line(m, s, 24, 12, 24, 36, 4);
         poly(m, s, {{14, 20}, {24, 10}, {34, 20}}, false, false);
         line(m, s, 8, 6, 40, 6, 4);
       }},
      {"play", [](cv::Mat& m, double s) { poly(m, s, {{14, 8}, {38, 24}, {14, 40}}, true); }},
      {"pause",
       [](cv::Mat& m, double s) {
         cv::rectangle(m, P(s, 12, 8), P(s, 20, 40), kInk, -1);
         cv::rectangle(m, P(s, 28, 8), P(s, 36, 40), kInk, -1);
       }},
      {"folder",
       [](cv::Mat& m, double s) { poly(m, s, {{5, 12}, {18, 12}, {22, 17}, {43, 17}, {43, 38}, {5, 38}}, false); }},
      {"add",
       [](cv::Mat& m, double s) {
         line(m, s, 24, 8, 24, 40, 6);
         line(m, s, 8, 24, 40, 24, 6);
       }},
      {"close",
       [](cv::Mat& m, double s) {
         line(m, s, 10, 10, 38, 38, 6);
         line(m, s, 38, 10, 10, 38, 6);
       }},
      {"check", [](cv::Mat& m, double s) { poly(m, s, {{8, 26}, {19, 37}, {41, 12}}, false, false); }},
      {"menu",
       [](cv::Mat& m, double s) {
         for (int k = 0; k < 3; ++k) line(m, s, 8, 13 + 11 * k, 40, 13 + 11 * k, 5);
       }},
      {"refresh",
       [](cv::Mat& m, double s) {
         cv::ellipse(m, P(s, 24, 24), cv::Size(int(14 * s), int(14 * s)), 0, 40, 340, kInk, 4, cv::LINE_AA);
         poly(m, s, {{36, 6}, {37, 19}, {26, 16}}, true);
       }},
      {"camera",
       [](cv::Mat& m, double s) {
         rect(m, s, 6, 15, 42, 39);
         cv::rectangle(m, P(s, 17, 9), P(s, 31, 15), kInk, -1);
         circle(m, s, 24, 27, 7);
       }},
      {"phone",
       [](cv::Mat& m, double s) {
         cv::rectangle(m, P(s, 15, 5), P(s, 33, 43), kInk, 3, cv::LINE_AA);
         line(m, s, 15, 36, 33, 36, 2);
         circle(m, s, 24, 40, 1.5, -1);
       }},
  };
  return kPainters;
}

}  // namespace

IconLibrary demo_icon_library(int size) {
  IconLibrary library;
  const double s = size / 48.0;
  for (const auto& [name, paint] : painters()) {
    cv::Mat img(size, size, CV_8UC1, cv::Scalar(255));
    paint(img, s);
    library.push_back({name, img});
  }
  return library;
}

std::vector<UIElement> match_icons(const std::vector<Rect>& rois, const cv::Mat& image, const IconLibrary& library) {
  std::vector<UIElement> out;
  if (library.empty()) return out;
  const cv::Rect bounds(0, 0, image.cols, image.rows);
  for (const auto& roi : rois) {
    const cv::Rect r = cv::Rect(cv::Point(int(std::floor(roi.x_min)), int(std::floor(roi.y_min))),
                                cv::Point(int(std::ceil(roi.x_max)), int(std::ceil(roi.y_max)))) &
                       bounds;
    if (r.width < 2 || r.height < 2) continue;
    const cv::Mat patch = image(r);
    double best = -2.0;
    const IconTemplate* winner = nullptr;
    for (const auto& icon : library) {
      const double score = icon_similarity(patch, icon.image);
      if (score > best) {
        best = score;
        winner = &icon;
      }
    }
    if (winner == nullptr || best < kIconThreshold) continue;
    UIElement e;
    e.kind = ElementKind::kIcon;
    e.label = winner->name;
    e.rect = roi;
    e.center = Coordinate{(roi.x_min + roi.x_max) / 2, (roi.y_min + roi.y_max) / 2};
    e.confidence = std::min(best, 1.0);
    e.provenance = "icon-ssim";
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace actbench::screenparse
