#include <opencv2/imgproc.hpp>

#include "actbench/screenparse.hpp"

namespace actbench::screenparse {

namespace {

constexpr int kWindow = 8;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

cv::Mat to_gray8(const cv::Mat& m) {
  cv::Mat gray;
  if (m.channels() == 3) cv::cvtColor(m, gray, cv::COLOR_BGR2GRAY);
  else if (m.channels() == 4) cv::cvtColor(m, gray, cv::COLOR_BGRA2GRAY);
  else gray = m;
  if (gray.depth() != CV_8U) gray.convertTo(gray, CV_8U);
  return gray;
}

// Sum over [x, x+w) x [y, y+h) of a (rows+1)x(cols+1) integral image.
inline double box_sum(const cv::Mat& integral, int x, int y, int w, int h) {
  return integral.at<double>(y + h, x + w) - integral.at<double>(y, x + w) - integral.at<double>(y + h, x) +
         integral.at<double>(y, x);
}

}  // namespace

double ssim(const cv::Mat& a, const cv::Mat& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("ssim: " + std::to_string(a.cols) + "x" + std::to_string(a.rows) + " vs " +
                            std::to_string(b.cols) + "x" + std::to_string(b.rows));
  if (a.empty()) throw DimensionMismatch("ssim: empty image");
  if (a.type() != CV_8UC1 || b.type() != CV_8UC1) throw std::invalid_argument("ssim: expected 8-bit grayscale");

  cv::Mat fa, fb;
  a.convertTo(fa, CV_64F);
  b.convertTo(fb, CV_64F);
  // Pixel values are integers, so every window sum below is exact.
  cv::Mat sa, sb, saa, sbb, sab;
  cv::integral(fa, sa, saa, CV_64F, CV_64F);
  cv::integral(fb, sb, sbb, CV_64F, CV_64F);
  cv::integral(fa.mul(fb), sab, CV_64F);

  const int wx = std::min(kWindow, a.cols);
  const int wy = std::min(kWindow, a.rows);
  const double n = double(wx) * double(wy);
  double total = 0.0;
  long count = 0;
  for (int y = 0; y + wy <= a.rows; ++y) {
    for (int x = 0; x + wx <= a.cols; ++x) {
      const double mx = box_sum(sa, x, y, wx, wy) / n;
      const double my = box_sum(sb, x, y, wx, wy) / n;
      const double vx = box_sum(saa, x, y, wx, wy) / n - mx * mx;
      const double vy = box_sum(sbb, x, y, wx, wy) / n - my * my;
      const double cxy = box_sum(sab, x, y, wx, wy) / n - mx * my;
      total += ((2 * mx * my + kC1) * (2 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
      ++count;
    }
  }
  return total / double(count);
}

double icon_similarity(const cv::Mat& roi, const cv::Mat& icon) {
  const cv::Size size(kIconCompareSize, kIconCompareSize);
  cv::Mat ra, rb;
  cv::resize(to_gray8(roi), ra, size, 0, 0, cv::INTER_LINEAR);
  cv::resize(to_gray8(icon), rb, size, 0, 0, cv::INTER_LINEAR);
  return ssim(ra, rb);
}

}  // namespace actbench::screenparse
