#include <algorithm>
#include <cmath>

#include "actbench/screenparse.hpp"

namespace actbench::screenparse {

std::string_view to_string(ColorName c) {
  switch (c) {
    case ColorName::kYellow: return "yellow";
    case ColorName::kBlue: return "blue";
    case ColorName::kGreen: return "green";
    case ColorName::kRed: return "red";
    case ColorName::kPink: return "pink";
    case ColorName::kViolet: return "violet";
    case ColorName::kWhite: return "white";
    case ColorName::kBlack: return "black";
    case ColorName::kOrange: return "orange";
    case ColorName::kBrown: return "brown";
    case ColorName::kGrey: return "grey";
  }
  return "grey";
}

// HSL buckets (hue in degrees, s and l in [0,1]):
//   s < 0.12            black (l < 0.15) / white (l > 0.85) / grey
//   l < 0.10            black     l > 0.95   white
//   [345, 15)           red, pink when l > 0.75
//   [15, 45)            orange, brown when l < 0.45
//   [45, 70)  yellow    [70, 170)  green     [170, 255) blue
//   [255, 290) violet   [290, 345) pink
ColorName classify_color(double r, double g, double b) {
  r = std::clamp(r, 0.0, 255.0) / 255.0;
  g = std::clamp(g, 0.0, 255.0) / 255.0;
  b = std::clamp(b, 0.0, 255.0) / 255.0;
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double l = (hi + lo) / 2;
  const double d = hi - lo;
  const double s = d == 0 ? 0.0 : d / (1 - std::abs(2 * l - 1));

  if (s < 0.12) {
    if (l < 0.15) return ColorName::kBlack;
    if (l > 0.85) return ColorName::kWhite;
    return ColorName::kGrey;
  }
  if (l < 0.10) return ColorName::kBlack;
  if (l > 0.95) return ColorName::kWhite;

  double h;
  if (hi == r) h = 60 * std::fmod((g - b) / d, 6.0);
  else if (hi == g) h = 60 * ((b - r) / d + 2);
  else h = 60 * ((r - g) / d + 4);
  if (h < 0) h += 360;

  if (h >= 345 || h < 15) return l > 0.75 ? ColorName::kPink : ColorName::kRed;
  if (h < 45) return l < 0.45 ? ColorName::kBrown : ColorName::kOrange;
  if (h < 70) return ColorName::kYellow;
  if (h < 170) return ColorName::kGreen;
  if (h < 255) return ColorName::kBlue;
  if (h < 290) return ColorName::kViolet;
  return ColorName::kPink;
}

std::vector<UIElement> bucket_colors(const std::vector<Rect>& rois, const cv::Mat& image) {
  std::vector<UIElement> out;
  const cv::Rect bounds(0, 0, image.cols, image.rows);
  for (const auto& roi : rois) {
    // Degenerate ROIs still cover the pixel they touch.
    const int x0 = std::clamp(int(std::floor(roi.x_min)), 0, std::max(0, image.cols - 1));
    const int y0 = std::clamp(int(std::floor(roi.y_min)), 0, std::max(0, image.rows - 1));
    const int x1 = std::max(x0 + 1, int(std::ceil(roi.x_max)));
    const int y1 = std::max(y0 + 1, int(std::ceil(roi.y_max)));
    const cv::Rect r = cv::Rect(cv::Point(x0, y0), cv::Point(x1, y1)) & bounds;
    if (r.area() == 0) continue;  // empty image
    const cv::Mat patch = image(r);

    // BGR(A) or grayscale input.
    auto rgb_at = [&](int y, int x) -> cv::Vec3d {
      if (patch.channels() == 1) {
        const double v = patch.at<uchar>(y, x);
        return {v, v, v};
      }
      const uchar* p = patch.ptr<uchar>(y) + x * patch.channels();
      return {double(p[2]), double(p[1]), double(p[0])};
    };

    cv::Vec3d sum(0, 0, 0);
    for (int y = 0; y < patch.rows; ++y)
      for (int x = 0; x < patch.cols; ++x) sum += rgb_at(y, x);
    const cv::Vec3d mean = sum / double(r.area());
    const ColorName name = classify_color(mean[0], mean[1], mean[2]);

    long agree = 0;
    for (int y = 0; y < patch.rows; ++y)
      for (int x = 0; x < patch.cols; ++x) {
        const auto c = rgb_at(y, x);
        if (classify_color(c[0], c[1], c[2]) == name) ++agree;
      }

    UIElement e;
    e.kind = ElementKind::kColor;
    e.label = std::string(to_string(name));
    e.rect = roi;
    e.center = Coordinate{(roi.x_min + roi.x_max) / 2, (roi.y_min + roi.y_max) / 2};
    e.confidence = double(agree) / double(r.area());
    e.provenance = "color-buckets";
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace actbench::screenparse
