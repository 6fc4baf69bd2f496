#pragma once

// Benchmark data on disk:
//
//   <root>/manifest.json        name, version, screen and task id index
//   <root>/screens/<id>.json    screen metadata with labeled bounding boxes
//   <root>/screens/<id>.png     screenshot (optional for scoring)
//   <root>/tasks/<id>.json      task text, rephrasings, scripts, split
//
// Field-level documentation lives in docs/dataset_schema.md.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "actbench/geometry.hpp"
#include "actbench/metrics.hpp"
#include "actbench/script.hpp"

namespace actbench::dataset {

enum class Platform { kMacOS, kLinux, kWindows, kWeb };
enum class Split { kTrain, kValidation, kTest };
enum class BoxKind { kInteractable, kBanner, kDropdown, kSubmit, kRadio, kOther };

inline constexpr std::array<Platform, 4> kAllPlatforms = {Platform::kMacOS, Platform::kLinux, Platform::kWindows,
                                                          Platform::kWeb};
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kValidation, Split::kTest};

std::string_view to_string(Platform p);
std::string_view display_name(Platform p);  // "Mac OS", "Linux", "Windows", "Web"
std::string_view to_string(Split s);
std::string_view to_string(BoxKind k);
std::optional<Platform> platform_from_string(std::string_view s);
std::optional<Split> split_from_string(std::string_view s);
std::optional<BoxKind> box_kind_from_string(std::string_view s);

struct BoundingBox {
  Rect rect;
  std::string label;
  BoxKind kind = BoxKind::kInteractable;
};

struct Screen {
  std::string id;
  std::filesystem::path image;  // absolute after loading
  Platform platform = Platform::kWeb;
  std::string application;
  int width = 0;
  int height = 0;
  std::vector<BoundingBox> boxes;
};

inline constexpr std::size_t kMaxRephrasings = 3;

struct TaskRecord {
  std::string id;
  std::string screen_id;
  std::string task_text;
  std::vector<std::string> rephrasings;
  std::string labeled_script;  // coordinates written as <label> placeholders
  std::optional<std::string> script;  // numeric script; derived from labeled_script when absent
  Split split = Split::kTrain;
};

struct Dataset {
  std::string name;
  std::string version;
  std::filesystem::path root;
  std::vector<Screen> screens;
  std::vector<TaskRecord> tasks;
  std::vector<std::string> warnings;

  // Throws std::out_of_range for an unknown id.
  const Screen& screen(std::string_view id) const;
  const Screen* find_screen(std::string_view id) const;
};

// --- Errors ----------------------------------------------------------------

class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::string kind, std::filesystem::path file, std::string where, const std::string& message);

  const std::string& kind() const noexcept { return kind_; }
  const std::filesystem::path& file() const noexcept { return file_; }
  // Line number ("line 12") or JSON pointer ("/boxes/3/rect") inside file.
  const std::string& where() const noexcept { return where_; }

 private:
  std::string kind_;
  std::filesystem::path file_;
  std::string where_;
};

class ManifestError : public DatasetError {
 public:
  ManifestError(std::filesystem::path file, std::string where, const std::string& message)
      : DatasetError("ManifestError", std::move(file), std::move(where), message) {}
};

class SchemaError : public DatasetError {
 public:
  SchemaError(std::filesystem::path file, std::string where, const std::string& message)
      : DatasetError("SchemaError", std::move(file), std::move(where), message) {}
};

class DanglingReference : public DatasetError {
 public:
  DanglingReference(std::filesystem::path file, std::string where, const std::string& message)
      : DatasetError("DanglingReference", std::move(file), std::move(where), message) {}
};

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnknownLabel : public LabelError {
 public:
  using LabelError::LabelError;
};
class AmbiguousLabel : public LabelError {
 public:
  using LabelError::LabelError;
};

// --- Operations --------------------------------------------------------------

// Loads and validates a dataset directory. Throws ManifestError,
// SchemaError or DanglingReference. Missing screenshots become warnings.
Dataset load_dataset(const std::filesystem::path& root);

// Writes a dataset in the on-disk layout (screenshots are not touched).
void save_dataset(const Dataset& dataset, const std::filesystem::path& root);

// Labels referenced as placeholders on lines that parse.
std::vector<std::string> placeholder_labels(std::string_view labeled_script);

// Throws UnknownLabel / AmbiguousLabel.
const BoundingBox& find_box(const Screen& screen, std::string_view label);

struct MappedScript {
  script::ActionScript script;
  // Per action: the label whose box center replaced the placeholder.
  std::vector<std::optional<std::string>> target_labels;
};

// Replaces every `<label>` with the pixel center of its box. Throws
// UnknownLabel, AmbiguousLabel or a script::ScriptError.
MappedScript reverse_map_with_targets(std::string_view labeled_script, const Screen& screen);
script::ActionScript reverse_map(std::string_view labeled_script, const Screen& screen);

struct GoldTask {
  script::ActionScript script;
  std::vector<metrics::GoldAction> actions;
};

enum class RejectReason {
  kSyntaxError,
  kUnknownAction,
  kArityError,
  kUnknownLabel,
  kAmbiguousLabel,
  kScriptMismatch,
  kMissingTargetBox,
  kCoordinateOutsideBox,
  kTooManyRephrasings,
  kEmptyTask,
};

std::string_view to_string(RejectReason reason);

class RecordRejected : public std::runtime_error {
 public:
  RecordRejected(RejectReason reason, const std::string& message);
  RejectReason reason() const noexcept { return reason_; }

 private:
  RejectReason reason_;
};

// Builds the gold script and the per-action gold payloads of a record.
// Throws RecordRejected when the record breaks a task invariant.
GoldTask resolve_gold(const TaskRecord& task, const Screen& screen);

struct Rejection {
  std::string task_id;
  RejectReason reason = RejectReason::kSyntaxError;
  std::string message;
};

struct FilterResult {
  Dataset kept;  // same screens, only the valid tasks
  std::vector<Rejection> rejected;
};

FilterResult filter_records(const Dataset& dataset);

struct SplitViolation {
  enum class Kind { kRephrasingAcrossSplits, kDuplicateAcrossSplits };
  Kind kind = Kind::kRephrasingAcrossSplits;
  std::string task_a;
  std::string task_b;
  std::string text;
};

std::string_view to_string(SplitViolation::Kind kind);

struct SplitVerdict {
  std::vector<SplitViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Compares normalized texts (case-folded, whitespace collapsed) of every task
// and its rephrasings. One violation per offending pair of records.
SplitVerdict check_split_integrity(const Dataset& dataset);

struct DatasetStats {
  std::array<std::array<std::size_t, 3>, 4> counts{};  // [platform][split]
  std::array<std::size_t, 3> split_totals{};
  std::array<std::size_t, 4> platform_totals{};
  std::size_t total = 0;
  std::array<std::size_t, 10> action_counts{};  // indexed like script::kAllActions
  std::size_t total_actions = 0;
  std::size_t unresolved_tasks = 0;  // records whose gold script did not resolve

  double split_percent(Split s) const;
  double action_percent(script::ActionName a) const;
};

DatasetStats dataset_stats(const Dataset& dataset);

// Plain-text renderings in the layout of the distribution tables.
std::string format_split_table(const DatasetStats& stats);
std::string format_action_table(const DatasetStats& stats);

}  // namespace actbench::dataset
