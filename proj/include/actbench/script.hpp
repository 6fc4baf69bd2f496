#pragma once

// Parser and printer for the straight-line automation script dialect:
//
//   pyautogui.click(100, 200)
//   pyautogui.hotkey('ctrl', 'c')
//   pyautogui.write("hello")
//
// One call per line. Blank lines and lines starting with '#' are skipped.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace actbench::script {

struct Coordinate {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

enum class ActionName {
  kClick,
  kDoubleClick,
  kRightClick,
  kMoveTo,
  kDragTo,
  kScroll,
  kHScroll,
  kPress,
  kHotkey,
  kWrite,
};

inline constexpr std::array<ActionName, 10> kAllActions = {
    ActionName::kClick,  ActionName::kDoubleClick, ActionName::kRightClick,
    ActionName::kMoveTo, ActionName::kDragTo,      ActionName::kScroll,
    ActionName::kHScroll, ActionName::kPress,      ActionName::kHotkey,
    ActionName::kWrite,
};

// Payload shape shared by a group of actions.
enum class ActionFamily { kMouse, kScroll, kKey, kWrite };

std::string_view to_string(ActionName name);
// Accepts the canonical callee names plus the `typewrite` alias of `write`.
std::optional<ActionName> action_from_string(std::string_view callee);
ActionFamily family_of(ActionName name);

using KeyList = std::vector<std::string>;

struct Action {
  ActionName name = ActionName::kClick;
  std::variant<Coordinate, std::int64_t, KeyList, std::string> args;

  static Action mouse(ActionName name, Coordinate at);
  static Action scroll(ActionName name, std::int64_t amount);
  static Action keys(ActionName name, KeyList keys);
  static Action write(std::string text);

  ActionFamily family() const { return family_of(name); }

  // Accessors throw std::bad_variant_access on a family mismatch.
  const Coordinate& coordinate() const { return std::get<Coordinate>(args); }
  std::int64_t amount() const { return std::get<std::int64_t>(args); }
  const KeyList& key_list() const { return std::get<KeyList>(args); }
  const std::string& text() const { return std::get<std::string>(args); }

  friend bool operator==(const Action&, const Action&) = default;
};

struct ActionScript {
  std::vector<Action> actions;
  std::string source_text;

  std::size_t size() const { return actions.size(); }

  // Structural equality ignores the source text.
  friend bool operator==(const ActionScript& a, const ActionScript& b) {
    return a.actions == b.actions;
  }
};

enum class ErrorKind { kSyntax, kUnknownAction, kArity };

std::string_view to_string(ErrorKind kind);

// Line numbers are 1-based. Line 0 refers to the script as a whole.
class ScriptError : public std::runtime_error {
 public:
  ScriptError(ErrorKind kind, int line, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  int line_;
  std::string detail_;
};

class SyntaxError : public ScriptError {
 public:
  SyntaxError(int line, const std::string& message)
      : ScriptError(ErrorKind::kSyntax, line, message) {}
};

class UnknownAction : public ScriptError {
 public:
  UnknownAction(int line, const std::string& message)
      : ScriptError(ErrorKind::kUnknownAction, line, message) {}
};

class ArityError : public ScriptError {
 public:
  ArityError(int line, const std::string& message)
      : ScriptError(ErrorKind::kArity, line, message) {}
};

// --- Call-level representation -------------------------------------------
// The lowest layer: a call with untyped literal arguments. Labeled scripts
// (with `<label>` placeholders standing for a coordinate pair) stop at this
// layer until the placeholders have been resolved.

struct NumberLiteral {
  double value = 0.0;
  bool integral = true;
  friend bool operator==(const NumberLiteral&, const NumberLiteral&) = default;
};

struct StringLiteral {
  std::string value;
  friend bool operator==(const StringLiteral&, const StringLiteral&) = default;
};

struct Placeholder {
  std::string label;
  friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

using Argument = std::variant<NumberLiteral, StringLiteral, Placeholder>;

struct Call {
  int line = 0;
  std::string callee;  // the part after `pyautogui.`
  std::vector<Argument> args;
};

struct CallOptions {
  bool allow_placeholders = false;
};

// Parses one non-blank, non-comment line. Throws SyntaxError.
Call parse_call(std::string_view line, int line_no, CallOptions options = {});

// Parses all statements of a text. Throws on the first error.
std::vector<Call> parse_calls(std::string_view text, CallOptions options = {});

// Converts a placeholder-free call into a typed action. Throws UnknownAction
// or ArityError.
Action to_action(const Call& call);

// True for blank lines and '#' comment lines.
bool is_skippable_line(std::string_view line);

// --- Script-level API ----------------------------------------------------

ActionScript parse_script(std::string_view text);

// Canonical form: one statement per line, `, ` between arguments, strings in
// single quotes, numbers in shortest round-trip form. No trailing newline.
std::string serialize_script(const ActionScript& script);
std::string serialize_action(const Action& action);

struct Diagnostic {
  int line = 0;
  ErrorKind kind = ErrorKind::kSyntax;
  std::string message;
};

struct Verdict {
  std::vector<Diagnostic> errors;
  bool ok() const { return errors.empty(); }
};

// Reports every failing line rather than stopping at the first one.
Verdict validate_syntax(std::string_view text);

}  // namespace actbench::script
