#pragma once

// Screenshot -> UI element list: OCR text, non-text regions, icon matches
// against a template library, color names, and an optional LLM relevance
// filter over the result.

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "actbench/geometry.hpp"
#include "actbench/llm.hpp"

namespace actbench::screenparse {

enum class ElementKind { kText, kIcon, kColor };
std::string_view to_string(ElementKind kind);

struct UIElement {
  ElementKind kind = ElementKind::kText;
  std::string label;
  Coordinate center;
  Rect rect;
  double confidence = 0.0;
  std::string provenance;  // backend that produced the element

  friend bool operator==(const UIElement&, const UIElement&) = default;
};

// Canonical element order: by rect (top, left, bottom, right), then kind, label.
bool canonical_less(const UIElement& a, const UIElement& b);

struct ScreenParse {
  std::vector<UIElement> elements;
  std::vector<std::string> warnings;
};

class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// --- Backends ---------------------------------------------------------------

struct TextSpan {
  std::string text;
  Rect rect;
  double confidence = 1.0;
};

// An image handed to a backend. `path` is set when the pixels came from a
// file, so out-of-process engines can read it directly.
struct ImageRef {
  const cv::Mat& pixels;  // BGR or grayscale, 8-bit
  std::optional<std::filesystem::path> path;
};

class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  virtual std::vector<TextSpan> recognize(const ImageRef& image) = 0;
  virtual std::string name() const = 0;
};

class SegmentationBackend {
 public:
  virtual ~SegmentationBackend() = default;
  virtual std::vector<Rect> segment(const ImageRef& image) = 0;
  virtual std::string name() const = 0;
};

// Connected components over a dilated edge map.
class ConnectedComponentSegmenter : public SegmentationBackend {
 public:
  struct Options {
    double canny_low = 50;
    double canny_high = 150;
    int dilate = 2;          // radius in pixels; joins glyphs into words
    int min_side = 6;
    double max_area_fraction = 0.9;
  };
  ConnectedComponentSegmenter() = default;
  explicit ConnectedComponentSegmenter(Options options) : options_(options) {}
  std::vector<Rect> segment(const ImageRef& image) override;
  std::string name() const override { return "cc-fallback"; }

 private:
  Options options_;
};

// Deterministic OCR double: finds renderings of known words drawn with
// OpenCV's Hershey simplex font by template matching.
class VocabularyOcrBackend : public OcrBackend {
 public:
  explicit VocabularyOcrBackend(std::vector<std::string> vocabulary, std::vector<double> scales = {0.5},
                                double min_score = 0.9);
  std::vector<TextSpan> recognize(const ImageRef& image) override;
  std::string name() const override { return "vocabulary-ocr"; }

 private:
  std::vector<std::string> vocabulary_;
  std::vector<double> scales_;
  double min_score_;
};

// Newline-delimited JSON over a child process's stdin/stdout. One request
// line per image; see docs/backend_protocol.md.
class SubprocessBackend : public OcrBackend, public SegmentationBackend {
 public:
  explicit SubprocessBackend(std::vector<std::string> command);
  ~SubprocessBackend() override;
  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

  std::vector<TextSpan> recognize(const ImageRef& image) override;
  std::vector<Rect> segment(const ImageRef& image) override;
  std::string name() const override;

 private:
  std::string round_trip(const std::string& op, const ImageRef& image);
  struct Process;
  std::vector<std::string> command_;
  std::unique_ptr<Process> process_;
};

// POSTs PNG bytes to <url>/ocr or <url>/segment, JSON response.
class HttpBackend : public OcrBackend, public SegmentationBackend {
 public:
  explicit HttpBackend(std::string base_url, int timeout_seconds = 60);
  std::vector<TextSpan> recognize(const ImageRef& image) override;
  std::vector<Rect> segment(const ImageRef& image) override;
  std::string name() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  int timeout_seconds_;
};

// Wire format shared by the subprocess and HTTP bindings.
std::vector<TextSpan> parse_text_spans(const std::string& json_text);
std::vector<Rect> parse_regions(const std::string& json_text);

// --- Operations --------------------------------------------------------------

// Throws BackendUnavailable when `ocr` is null.
std::vector<UIElement> extract_text(const ImageRef& image, OcrBackend* ocr);

// Uses `backend` when given, otherwise the connected-component fallback
// (BackendUnavailable when the fallback is disabled). Regions whose IoU with
// any text box exceeds `text_overlap_iou` are dropped.
struct SegmentOptions {
  bool allow_fallback = true;
  double text_overlap_iou = 0.5;
};
std::vector<Rect> segment_regions(const ImageRef& image, SegmentationBackend* backend,
                                  const std::vector<Rect>& text_boxes, const SegmentOptions& options = {});

// Mean SSIM over all 8x8 windows of two equal-size 8-bit grayscale images.
double ssim(const cv::Mat& a, const cv::Mat& b);

inline constexpr int kIconCompareSize = 32;
inline constexpr double kIconThreshold = 0.95;

// Grayscale, bilinear resize to 32x32, then ssim.
double icon_similarity(const cv::Mat& roi, const cv::Mat& icon);

struct IconTemplate {
  std::string name;
  cv::Mat image;  // 8-bit grayscale
};

using IconLibrary = std::vector<IconTemplate>;

// Reads <dir>/index.json ({"file.png": "functionality", ...}).
IconLibrary load_icon_library(const std::filesystem::path& dir);
void save_icon_library(const IconLibrary& library, const std::filesystem::path& dir);
// The procedurally drawn demo set shipped under resources/icons.
IconLibrary demo_icon_library(int size = 48);

// One element per ROI whose best template scores >= 0.95.
std::vector<UIElement> match_icons(const std::vector<Rect>& rois, const cv::Mat& image, const IconLibrary& library);

enum class ColorName { kYellow, kBlue, kGreen, kRed, kPink, kViolet, kWhite, kBlack, kOrange, kBrown, kGrey };
inline constexpr std::array<ColorName, 11> kAllColors = {ColorName::kYellow, ColorName::kBlue,   ColorName::kGreen,
                                                        ColorName::kRed,    ColorName::kPink,   ColorName::kViolet,
                                                        ColorName::kWhite,  ColorName::kBlack,  ColorName::kOrange,
                                                        ColorName::kBrown,  ColorName::kGrey};
std::string_view to_string(ColorName c);
ColorName classify_color(double r, double g, double b);  // channels in [0, 255]

// Mean RGB of each ROI -> one color element; confidence is the share of the
// ROI's pixels that fall in the same bucket.
std::vector<UIElement> bucket_colors(const std::vector<Rect>& rois, const cv::Mat& image);

// "<ordinal>:<kind>:<label>", ordinal being the index in `elements`.
std::string element_identifier(std::size_t ordinal, const UIElement& element);

class UnparsableResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FilterOutcome {
  std::vector<UIElement> elements;
  std::vector<std::string> warnings;
};

std::string build_filter_prompt(const std::string& task_text, const std::vector<UIElement>& elements);
// Identifiers listed in the response, in input order. Throws UnparsableResponse.
std::vector<std::size_t> parse_filter_response(const std::string& response, const std::vector<UIElement>& elements);

// Keeps the subset named by the client. ClientError propagates; an
// unparsable answer keeps every element and adds a warning.
FilterOutcome filter_elements(const std::string& task_text, const std::vector<UIElement>& elements,
                              llm::CompletionClient& client);

struct PipelineConfig {
  OcrBackend* ocr = nullptr;            // null: skip text extraction
  SegmentationBackend* segmenter = nullptr;  // null: connected-component fallback
  const IconLibrary* icons = nullptr;   // null or empty: no icon matching
  llm::CompletionClient* filter = nullptr;  // null: no filtering
  SegmentOptions segment;
};

// text -> segment -> drop text-overlapping regions -> icons + colors ->
// canonical order -> optional filter.
ScreenParse parse_screen(const ImageRef& image, const std::string& task_text, const PipelineConfig& config);

}  // namespace actbench::screenparse
