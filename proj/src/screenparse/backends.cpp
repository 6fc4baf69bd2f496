#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <random>

#include <fcntl.h>
#include <pthread.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "actbench/http.hpp"
#include "actbench/screenparse.hpp"

namespace actbench::screenparse {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

cv::Mat gray_of(const cv::Mat& m) {
  cv::Mat g;
  if (m.channels() == 3) cv::cvtColor(m, g, cv::COLOR_BGR2GRAY);
  else if (m.channels() == 4) cv::cvtColor(m, g, cv::COLOR_BGRA2GRAY);
  else g = m;
  return g;
}

Rect rect_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_number(); }))
    throw BackendUnavailable("backend response: box must be [x_min, y_min, x_max, y_max]");
  Rect r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!r.valid()) throw BackendUnavailable("backend response: invalid box " + to_string(r));
  return r;
}

json parse_reply(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw BackendUnavailable("backend response is not JSON: " + text.substr(0, 120));
  }
  if (!j.is_object()) throw BackendUnavailable("backend response must be a JSON object");
  if (j.contains("error")) throw BackendUnavailable("backend error: " + j["error"].dump());
  return j;
}

}  // namespace

std::vector<TextSpan> parse_text_spans(const std::string& json_text) {
  const json j = parse_reply(json_text);
  if (!j.contains("spans") || !j["spans"].is_array()) throw BackendUnavailable("backend response lacks `spans`");
  std::vector<TextSpan> spans;
  for (const auto& s : j["spans"]) {
    if (!s.is_object() || !s.contains("text") || !s["text"].is_string())
      throw BackendUnavailable("backend response: span needs `text`");
    TextSpan span{s["text"].get<std::string>(), rect_from_json(s.value("box", json())), s.value("confidence", 1.0)};
    span.confidence = std::clamp(span.confidence, 0.0, 1.0);
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<Rect> parse_regions(const std::string& json_text) {
  const json j = parse_reply(json_text);
  if (!j.contains("regions") || !j["regions"].is_array()) throw BackendUnavailable("backend response lacks `regions`");
  std::vector<Rect> regions;
  for (const auto& r : j["regions"]) regions.push_back(rect_from_json(r));
  return regions;
}

// --- Connected components -----------------------------------------------------

std::vector<Rect> ConnectedComponentSegmenter::segment(const ImageRef& image) {
  const cv::Mat gray = gray_of(image.pixels);
  if (gray.empty()) return {};
  cv::Mat edges;
  cv::Canny(gray, edges, options_.canny_low, options_.canny_high);
  if (options_.dilate > 0) {
    const int k = 2 * options_.dilate + 1;
    cv::dilate(edges, edges, cv::getStructuringElement(cv::MORPH_RECT, {k, k}));
  }
  cv::Mat labels, stats, centroids;
  const int n = cv::connectedComponentsWithStats(edges, labels, stats, centroids, 8, CV_32S);

  const double image_area = double(gray.cols) * double(gray.rows);
  std::vector<Rect> out;
  for (int i = 1; i < n; ++i) {
    // Undo the dilation margin, clamped to the image.
    const int d = options_.dilate;
    const int x0 = std::max(0, stats.at<int>(i, cv::CC_STAT_LEFT) + d);
    const int y0 = std::max(0, stats.at<int>(i, cv::CC_STAT_TOP) + d);
    const int x1 = std::min(gray.cols, stats.at<int>(i, cv::CC_STAT_LEFT) + stats.at<int>(i, cv::CC_STAT_WIDTH) - d);
    const int y1 = std::min(gray.rows, stats.at<int>(i, cv::CC_STAT_TOP) + stats.at<int>(i, cv::CC_STAT_HEIGHT) - d);
    if (x1 - x0 < options_.min_side || y1 - y0 < options_.min_side) continue;
    if (double(x1 - x0) * double(y1 - y0) > options_.max_area_fraction * image_area) continue;
    out.push_back(Rect{double(x0), double(y0), double(x1), double(y1)});
  }
  std::sort(out.begin(), out.end(), [](const Rect& a, const Rect& b) {
    return std::tie(a.y_min, a.x_min, a.y_max, a.x_max) < std::tie(b.y_min, b.x_min, b.y_max, b.x_max);
  });
  return out;
}

// --- Vocabulary OCR -------------------------------------------------------------

VocabularyOcrBackend::VocabularyOcrBackend(std::vector<std::string> vocabulary, std::vector<double> scales,
                                           double min_score)
    : vocabulary_(std::move(vocabulary)), scales_(std::move(scales)), min_score_(min_score) {}

std::vector<TextSpan> VocabularyOcrBackend::recognize(const ImageRef& image) {
  const cv::Mat gray = gray_of(image.pixels);
  std::vector<TextSpan> hits;
  for (const auto& word : vocabulary_) {
    for (double scale : scales_) {
      int baseline = 0;
      const auto size = cv::getTextSize(word, cv::FONT_HERSHEY_SIMPLEX, scale, 1, &baseline);
      cv::Mat canvas(size.height + baseline + 8, size.width + 8, CV_8UC1, cv::Scalar(255));
      cv::putText(canvas, word, {4, 4 + size.height}, cv::FONT_HERSHEY_SIMPLEX, scale, cv::Scalar(0), 1, cv::LINE_AA);
      cv::Mat ink;
      cv::findNonZero(255 - canvas, ink);
      if (ink.empty()) continue;
      const cv::Rect tight = cv::boundingRect(ink);
      const cv::Mat tmpl = canvas(tight);
      if (tmpl.cols > gray.cols || tmpl.rows > gray.rows) continue;

      cv::Mat score;
      cv::matchTemplate(gray, tmpl, score, cv::TM_CCOEFF_NORMED);
      score = cv::abs(score);  // light-on-dark text correlates negatively
      cv::patchNaNs(score, 0.0);
      while (true) {
        double best;
        cv::Point at;
        cv::minMaxLoc(score, nullptr, &best, nullptr, &at);
        if (best < min_score_) break;
        hits.push_back({word,
                        Rect{double(at.x), double(at.y), double(at.x + tmpl.cols), double(at.y + tmpl.rows)},
                        std::min(best, 1.0)});
        const cv::Rect suppress(at.x - tmpl.cols / 2, at.y - tmpl.rows / 2, tmpl.cols, tmpl.rows);
        score(suppress & cv::Rect(0, 0, score.cols, score.rows)).setTo(0);
      }
    }
  }
  // Overlapping hits from different words or scales: keep the stronger one.
  std::sort(hits.begin(), hits.end(), [](const TextSpan& a, const TextSpan& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.text < b.text;
  });
  std::vector<TextSpan> kept;
  for (auto& h : hits) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const TextSpan& k) { return iou(k.rect, h.rect) > 0.3; });
    if (!clash) kept.push_back(std::move(h));
  }
  return kept;
}

// --- Subprocess -------------------------------------------------------------------

struct SubprocessBackend::Process {
  pid_t pid = -1;
  int to_child = -1;
  FILE* from_child = nullptr;
  std::mutex mutex;

  ~Process() {
    if (to_child >= 0) close(to_child);
    if (from_child != nullptr) fclose(from_child);
    if (pid > 0) {
      int status = 0;
      if (waitpid(pid, &status, WNOHANG) == 0) {
        kill(pid, SIGTERM);
        waitpid(pid, &status, 0);
      }
    }
  }
};

SubprocessBackend::SubprocessBackend(std::vector<std::string> command) : command_(std::move(command)) {
  if (command_.empty()) throw BackendUnavailable("subprocess backend: empty command");
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw BackendUnavailable("pipe: " + std::string(std::strerror(errno)));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendUnavailable("pipe: " + std::string(std::strerror(errno)));
  }
  // Lets the parent detect a failed exec: the write end closes on success.
  int exec_pipe[2];
  if (pipe2(exec_pipe, O_CLOEXEC) != 0) throw BackendUnavailable("pipe: " + std::string(std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0) throw BackendUnavailable("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(exec_pipe[0]);
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    const int err = errno;
    (void)!write(exec_pipe[1], &err, sizeof err);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(exec_pipe[1]);
  process_ = std::make_unique<Process>();
  process_->pid = pid;
  process_->to_child = in_pipe[1];
  process_->from_child = fdopen(out_pipe[0], "r");

  int err = 0;
  const auto n = read(exec_pipe[0], &err, sizeof err);
  close(exec_pipe[0]);
  if (n == sizeof err) throw BackendUnavailable("cannot start `" + command_[0] + "`: " + std::strerror(err));
}

SubprocessBackend::~SubprocessBackend() = default;

std::string SubprocessBackend::name() const { return "subprocess:" + command_[0]; }

std::string SubprocessBackend::round_trip(const std::string& op, const ImageRef& image) {
  fs::path path;
  std::optional<fs::path> temp;
  if (image.path) {
    path = fs::absolute(*image.path);
  } else {
    temp = fs::temp_directory_path() / ("actbench_req_" + std::to_string(getpid()) + "_" +
                                        std::to_string(std::random_device{}()) + ".png");
    cv::imwrite(temp->string(), image.pixels);
    path = *temp;
  }
  const std::string line =
      json{{"op", op}, {"image_path", path.string()}, {"width", image.pixels.cols}, {"height", image.pixels.rows}}
          .dump() +
      "\n";

  std::string reply;
  {
    std::lock_guard lock(process_->mutex);
    sigset_t pipe_set, old;
    sigemptyset(&pipe_set);
    sigaddset(&pipe_set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &pipe_set, &old);
    std::size_t written = 0;
    bool broken = false;
    while (written < line.size()) {
      const auto n = write(process_->to_child, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        broken = true;
        break;
      }
      written += static_cast<std::size_t>(n);
    }
    if (broken) {
      const timespec zero{0, 0};
      sigtimedwait(&pipe_set, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old, nullptr);

    char* buf = nullptr;
    std::size_t cap = 0;
    const auto got = broken ? -1 : getline(&buf, &cap, process_->from_child);
    if (got > 0) reply.assign(buf, static_cast<std::size_t>(got));
    std::free(buf);
    if (temp) fs::remove(*temp);
    if (got <= 0) throw BackendUnavailable(name() + ": process closed its output");
  }
  return reply;
}

std::vector<TextSpan> SubprocessBackend::recognize(const ImageRef& image) {
  return parse_text_spans(round_trip("ocr", image));
}

std::vector<Rect> SubprocessBackend::segment(const ImageRef& image) { return parse_regions(round_trip("segment", image)); }

// --- HTTP -------------------------------------------------------------------------

HttpBackend::HttpBackend(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw BackendUnavailable("http backend: empty URL");
}

namespace {

std::string http_call(const std::string& url, const ImageRef& image, int timeout_seconds) {
  std::vector<uchar> png;
  if (!cv::imencode(".png", image.pixels, png)) throw BackendUnavailable("cannot encode image as PNG");
  try {
    auto res = net::post(url, std::string(png.begin(), png.end()), "image/png", {},
                         std::chrono::seconds(timeout_seconds));
    if (res.status < 200 || res.status >= 300)
      throw BackendUnavailable(url + ": HTTP " + std::to_string(res.status));
    return res.body;
  } catch (const net::TransportError& e) {
    throw BackendUnavailable(e.what());
  }
}

}  // namespace

std::vector<TextSpan> HttpBackend::recognize(const ImageRef& image) {
  return parse_text_spans(http_call(base_url_ + "/ocr", image, timeout_seconds_));
}

std::vector<Rect> HttpBackend::segment(const ImageRef& image) {
  return parse_regions(http_call(base_url_ + "/segment", image, timeout_seconds_));
}

}  // namespace actbench::screenparse
