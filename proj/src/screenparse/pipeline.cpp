#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actbench/screenparse.hpp"

namespace actbench::screenparse {

using json = nlohmann::json;

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::kText: return "text";
    case ElementKind::kIcon: return "icon";
    case ElementKind::kColor: return "color";
  }
  return "?";
}

bool canonical_less(const UIElement& a, const UIElement& b) {
  return std::tie(a.rect.y_min, a.rect.x_min, a.rect.y_max, a.rect.x_max, a.kind, a.label) <
         std::tie(b.rect.y_min, b.rect.x_min, b.rect.y_max, b.rect.x_max, b.kind, b.label);
}

std::vector<UIElement> extract_text(const ImageRef& image, OcrBackend* ocr) {
  if (ocr == nullptr) throw BackendUnavailable("no OCR backend configured");
  std::vector<UIElement> out;
  for (auto& span : ocr->recognize(image)) {
    UIElement e;
    e.kind = ElementKind::kText;
    e.label = std::move(span.text);
    e.rect = span.rect;
    e.center = Coordinate{(span.rect.x_min + span.rect.x_max) / 2, (span.rect.y_min + span.rect.y_max) / 2};
    e.confidence = span.confidence;
    e.provenance = ocr->name();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Rect> segment_regions(const ImageRef& image, SegmentationBackend* backend,
                                  const std::vector<Rect>& text_boxes, const SegmentOptions& options) {
  std::vector<Rect> regions;
  if (backend != nullptr) {
    regions = backend->segment(image);
  } else {
    if (!options.allow_fallback) throw BackendUnavailable("no segmentation backend configured");
    regions = ConnectedComponentSegmenter().segment(image);
  }
  std::erase_if(regions, [&](const Rect& r) {
    return std::any_of(text_boxes.begin(), text_boxes.end(),
                       [&](const Rect& t) { return iou(r, t) > options.text_overlap_iou; });
  });
  return regions;
}

std::string element_identifier(std::size_t ordinal, const UIElement& element) {
  std::string label = element.label;
  std::replace_if(label.begin(), label.end(), [](char c) { return c == '\n' || c == '\r' || c == '"'; }, ' ');
  return std::to_string(ordinal) + ":" + std::string(to_string(element.kind)) + ":" + label;
}

std::string build_filter_prompt(const std::string& task_text, const std::vector<UIElement>& elements) {
  std::ostringstream os;
  os << "Task: " << task_text << "\n\n";
  os << "Screen elements, one per line as <identifier> @ (x, y):\n";
  for (std::size_t i = 0; i < elements.size(); ++i)
    os << element_identifier(i, elements[i]) << " @ (" << elements[i].center.x << ", " << elements[i].center.y
       << ")\n";
  os << "\nReply with a JSON array containing the identifiers of every element that may be needed to "
        "complete the task, for example [\"0:text:Submit\"]. Do not add any other text.\n";
  return os.str();
}

std::vector<std::size_t> parse_filter_response(const std::string& response, const std::vector<UIElement>& elements) {
  // First bracketed JSON array in the response, skipping brackets inside strings.
  const auto open = response.find('[');
  if (open == std::string::npos) throw UnparsableResponse("no JSON array in response");
  int depth = 0;
  bool in_string = false;
  std::size_t close = std::string::npos;
  for (std::size_t i = open; i < response.size() && close == std::string::npos; ++i) {
    const char c = response[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']' && --depth == 0) {
      close = i;
    }
  }
  if (close == std::string::npos) throw UnparsableResponse("unterminated JSON array in response");

  json arr;
  try {
    arr = json::parse(response.substr(open, close - open + 1));
  } catch (const json::exception&) {
    throw UnparsableResponse("malformed JSON array in response");
  }

  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < elements.size(); ++i) by_id.emplace(element_identifier(i, elements[i]), i);
  std::set<std::size_t> picked;
  for (const auto& item : arr) {
    if (item.is_string()) {
      std::string id = item.get<std::string>();
      const auto b = id.find_first_not_of(" \t");
      const auto e = id.find_last_not_of(" \t");
      id = b == std::string::npos ? std::string() : id.substr(b, e - b + 1);
      if (auto it = by_id.find(id); it != by_id.end()) picked.insert(it->second);
    } else if (item.is_number_unsigned() && item.get<std::size_t>() < elements.size()) {
      picked.insert(item.get<std::size_t>());
    }
  }
  return {picked.begin(), picked.end()};
}

FilterOutcome filter_elements(const std::string& task_text, const std::vector<UIElement>& elements,
                              llm::CompletionClient& client) {
  FilterOutcome out;
  if (elements.empty()) return out;
  llm::CompletionRequest request;
  request.system = "You select the user interface elements that are relevant to a computer task.";
  request.user = build_filter_prompt(task_text, elements);
  const auto response = client.complete(request);
  try {
    for (auto i : parse_filter_response(response.text, elements)) out.elements.push_back(elements[i]);
  } catch (const UnparsableResponse& e) {
    out.elements = elements;
    out.warnings.push_back(std::string("element filter: ") + e.what() + "; keeping all elements");
  }
  return out;
}

ScreenParse parse_screen(const ImageRef& image, const std::string& task_text, const PipelineConfig& config) {
  ScreenParse parse;
  std::vector<UIElement> elements;
  std::vector<Rect> text_boxes;
  if (config.ocr != nullptr) {
    elements = extract_text(image, config.ocr);
    for (const auto& e : elements) text_boxes.push_back(e.rect);
  }
  const auto regions = segment_regions(image, config.segmenter, text_boxes, config.segment);
  if (config.icons != nullptr && !config.icons->empty()) {
    auto icons = match_icons(regions, image.pixels, *config.icons);
    elements.insert(elements.end(), icons.begin(), icons.end());
  }
  auto colors = bucket_colors(regions, image.pixels);
  elements.insert(elements.end(), colors.begin(), colors.end());

  std::sort(elements.begin(), elements.end(), [](const UIElement& a, const UIElement& b) {
    if (canonical_less(a, b)) return true;
    if (canonical_less(b, a)) return false;
    return a.confidence > b.confidence;
  });
  elements.erase(std::unique(elements.begin(), elements.end(),
                             [](const UIElement& a, const UIElement& b) {
                               return a.kind == b.kind && a.rect == b.rect && a.label == b.label;
                             }),
                 elements.end());

  if (config.filter != nullptr) {
    auto filtered = filter_elements(task_text, elements, *config.filter);
    parse.elements = std::move(filtered.elements);
    parse.warnings = std::move(filtered.warnings);
  } else {
    parse.elements = std::move(elements);
  }
  return parse;
}

}  // namespace actbench::screenparse
