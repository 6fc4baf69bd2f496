#include "actbench/script.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

namespace actbench::script {

namespace {

constexpr std::string_view kModulePrefix = "pyautogui";

struct NameEntry {
  std::string_view spelling;
  ActionName name;
};

constexpr std::array<NameEntry, 11> kNameTable = {{
    {"click", ActionName::kClick},
    {"doubleClick", ActionName::kDoubleClick},
    {"rightClick", ActionName::kRightClick},
    {"moveTo", ActionName::kMoveTo},
    {"dragTo", ActionName::kDragTo},
    {"scroll", ActionName::kScroll},
    {"hscroll", ActionName::kHScroll},
    {"press", ActionName::kPress},
    {"hotkey", ActionName::kHotkey},
    {"write", ActionName::kWrite},
    {"typewrite", ActionName::kWrite},
}};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

class LineLexer {
 public:
  LineLexer(std::string_view text, int line_no, CallOptions options)
      : text_(text), line_(line_no), options_(options) {}

  Call parse() {
    Call call;
    call.line = line_;
    skip_space();
    std::string module = identifier("expected `pyautogui`");
    if (module != kModulePrefix) fail("statements must call `pyautogui.<name>(...)`, found `" + module + "`");
    skip_space();
    expect('.');
    skip_space();
    call.callee = identifier("expected a function name after `pyautogui.`");
    skip_space();
    expect('(');
    skip_space();
    if (!consume(')')) {
      while (true) {
        skip_space();
        call.args.push_back(argument());
        skip_space();
        if (consume(')')) break;
        if (!consume(',')) fail("expected `,` or `)` in argument list");
      }
    }
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing text after `)`");
    return call;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(line_, message + " (column " + std::to_string(pos_ + 1) + ")");
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end() && is_space(text_[pos_])) ++pos_;
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected `") + c + "`");
  }

  std::string identifier(const char* what) {
    if (!is_ident_start(peek())) fail(what);
    std::size_t start = pos_;
    while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Argument argument() {
    char c = peek();
    if (c == '\'' || c == '"') return string_literal();
    if (c == '<') {
      if (!options_.allow_placeholders) fail("label placeholders are only allowed in labeled scripts");
      return placeholder();
    }
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c)) != 0)
      return number_literal();
    if (is_ident_start(c)) {
      std::size_t save = pos_;
      std::string name = identifier("");
      skip_space();
      if (peek() == '=') {
        pos_ = save;
        fail("keyword argument `" + name + "` is not supported");
      }
      pos_ = save;
      fail("bare identifier `" + name + "` is not a literal");
    }
    if (at_end()) fail("unterminated argument list");
    fail(std::string("unexpected character `") + c + "`");
  }

  StringLiteral string_literal() {
    char quote = text_[pos_++];
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == quote) break;
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated string literal");
      char e = text_[pos_++];
      switch (e) {
        case '\\': value.push_back('\\'); break;
        case '\'': value.push_back('\''); break;
        case '"': value.push_back('"'); break;
        case 'n': value.push_back('\n'); break;
        case 't': value.push_back('\t'); break;
        case 'r': value.push_back('\r'); break;
        default:
          // Unknown escapes stay literal.
          value.push_back('\\');
          value.push_back(e);
      }
    }
    return StringLiteral{std::move(value)};
  }

  NumberLiteral number_literal() {
    std::size_t start = pos_;
    bool negative = false;
    if (peek() == '+' || peek() == '-') {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    std::size_t digits_start = pos_;
    std::size_t int_digits = 0;
    while (std::isdigit(static_cast<unsigned char>(peek())) != 0) {
      ++pos_;
      ++int_digits;
    }
    bool integral = true;
    std::size_t frac_digits = 0;
    if (peek() == '.') {
      integral = false;
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek())) != 0) {
        ++pos_;
        ++frac_digits;
      }
    }
    if (int_digits + frac_digits == 0) {
      pos_ = start;
      fail("malformed number literal");
    }
    if (is_ident_char(peek()) || peek() == '.') fail("malformed number literal");
    std::string_view body = text_.substr(digits_start, pos_ - digits_start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number literal");
    }
    return NumberLiteral{negative ? -value : value, integral};
  }

  Placeholder placeholder() {
    ++pos_;  // '<'
    std::size_t start = pos_;
    while (!at_end() && text_[pos_] != '>') ++pos_;
    if (at_end()) fail("unterminated label placeholder");
    std::string_view label = trim(text_.substr(start, pos_ - start));
    ++pos_;  // '>'
    if (label.empty()) fail("empty label placeholder");
    return Placeholder{std::string(label)};
  }

  std::string_view text_;
  int line_;
  CallOptions options_;
  std::size_t pos_ = 0;
};

std::string describe(const Argument& arg) {
  if (std::holds_alternative<NumberLiteral>(arg)) return "number";
  if (std::holds_alternative<StringLiteral>(arg)) return "string";
  return "placeholder";
}

[[noreturn]] void arity(const Call& call, const std::string& message) {
  throw ArityError(call.line, "pyautogui." + call.callee + ": " + message);
}

double coordinate_value(const Call& call, const Argument& arg, const char* axis) {
  const auto* number = std::get_if<NumberLiteral>(&arg);
  if (number == nullptr) arity(call, std::string(axis) + " must be a number, got " + describe(arg));
  if (number->value < 0.0) arity(call, std::string(axis) + " must be non-negative");
  return number->value;
}

std::string key_value(const Call& call, const Argument& arg) {
  const auto* str = std::get_if<StringLiteral>(&arg);
  if (str == nullptr) arity(call, "keys must be strings, got " + describe(arg));
  if (str->value.empty()) arity(call, "key names must be non-empty");
  return lower(str->value);
}

void append_number(std::string& out, double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

void append_quoted(std::string& out, const std::string& value) {
  out.push_back('\'');
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
}

template <typename Fn>
void for_each_statement(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!is_skippable_line(line)) fn(line, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

std::string_view to_string(ActionName name) {
  for (const auto& entry : kNameTable)
    if (entry.name == name) return entry.spelling;
  return "?";
}

std::optional<ActionName> action_from_string(std::string_view callee) {
  for (const auto& entry : kNameTable)
    if (entry.spelling == callee) return entry.name;
  return std::nullopt;
}

ActionFamily family_of(ActionName name) {
  switch (name) {
    case ActionName::kClick:
    case ActionName::kDoubleClick:
    case ActionName::kRightClick:
    case ActionName::kMoveTo:
    case ActionName::kDragTo:
      return ActionFamily::kMouse;
    case ActionName::kScroll:
    case ActionName::kHScroll:
      return ActionFamily::kScroll;
    case ActionName::kPress:
    case ActionName::kHotkey:
      return ActionFamily::kKey;
    case ActionName::kWrite:
      return ActionFamily::kWrite;
  }
  return ActionFamily::kMouse;
}

Action Action::mouse(ActionName name, Coordinate at) { return Action{name, at}; }
Action Action::scroll(ActionName name, std::int64_t amount) { return Action{name, amount}; }
Action Action::keys(ActionName name, KeyList keys) { return Action{name, std::move(keys)}; }
Action Action::write(std::string text) { return Action{ActionName::kWrite, std::move(text)}; }

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSyntax: return "SyntaxError";
    case ErrorKind::kUnknownAction: return "UnknownAction";
    case ErrorKind::kArity: return "ArityError";
  }
  return "?";
}

ScriptError::ScriptError(ErrorKind kind, int line, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " at line " + std::to_string(line) + ": " + message),
      kind_(kind),
      line_(line),
      detail_(message) {}

bool is_skippable_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

Call parse_call(std::string_view line, int line_no, CallOptions options) {
  return LineLexer(line, line_no, options).parse();
}

std::vector<Call> parse_calls(std::string_view text, CallOptions options) {
  std::vector<Call> calls;
  for_each_statement(text, [&](std::string_view line, int line_no) {
    calls.push_back(parse_call(line, line_no, options));
  });
  return calls;
}

Action to_action(const Call& call) {
  auto name = action_from_string(call.callee);
  if (!name) throw UnknownAction(call.line, "`pyautogui." + call.callee + "` is not a supported action");

  for (const auto& arg : call.args)
    if (std::holds_alternative<Placeholder>(arg))
      arity(call, "unresolved label placeholder <" + std::get<Placeholder>(arg).label + ">");

  const auto n = call.args.size();
  switch (family_of(*name)) {
    case ActionFamily::kMouse: {
      if (n != 2) arity(call, "expected 2 coordinate arguments, got " + std::to_string(n));
      return Action::mouse(*name, {coordinate_value(call, call.args[0], "x"),
                                   coordinate_value(call, call.args[1], "y")});
    }
    case ActionFamily::kScroll: {
      if (n != 1) arity(call, "expected 1 scroll amount, got " + std::to_string(n));
      const auto* number = std::get_if<NumberLiteral>(&call.args[0]);
      if (number == nullptr || !number->integral) arity(call, "scroll amount must be an integer");
      constexpr double kLimit = 9.0e15;
      if (std::abs(number->value) > kLimit) arity(call, "scroll amount out of range");
      return Action::scroll(*name, static_cast<std::int64_t>(number->value));
    }
    case ActionFamily::kKey: {
      if (*name == ActionName::kPress && n != 1)
        arity(call, "press takes exactly 1 key, got " + std::to_string(n));
      if (*name == ActionName::kHotkey && n < 2)
        arity(call, "hotkey takes at least 2 keys, got " + std::to_string(n));
      KeyList keys;
      keys.reserve(n);
      for (const auto& arg : call.args) keys.push_back(key_value(call, arg));
      return Action::keys(*name, std::move(keys));
    }
    case ActionFamily::kWrite: {
      if (n != 1) arity(call, "expected 1 text argument, got " + std::to_string(n));
      const auto* str = std::get_if<StringLiteral>(&call.args[0]);
      if (str == nullptr) arity(call, "text must be a string, got " + describe(call.args[0]));
      if (str->value.empty()) arity(call, "text must be non-empty");
      return Action::write(str->value);
    }
  }
  arity(call, "unhandled action family");
}

ActionScript parse_script(std::string_view text) {
  ActionScript script;
  script.source_text = std::string(text);
  for_each_statement(text, [&](std::string_view line, int line_no) {
    script.actions.push_back(to_action(parse_call(line, line_no)));
  });
  if (script.actions.empty()) throw SyntaxError(0, "script contains no statements");
  return script;
}

std::string serialize_action(const Action& action) {
  std::string out = "pyautogui.";
  out += to_string(action.name);
  out.push_back('(');
  switch (action.family()) {
    case ActionFamily::kMouse:
      append_number(out, action.coordinate().x);
      out += ", ";
      append_number(out, action.coordinate().y);
      break;
    case ActionFamily::kScroll:
      out += std::to_string(action.amount());
      break;
    case ActionFamily::kKey: {
      bool first = true;
      for (const auto& key : action.key_list()) {
        if (!first) out += ", ";
        first = false;
        append_quoted(out, key);
      }
      break;
    }
    case ActionFamily::kWrite:
      append_quoted(out, action.text());
      break;
  }
  out.push_back(')');
  return out;
}

std::string serialize_script(const ActionScript& script) {
  std::string out;
  for (std::size_t i = 0; i < script.actions.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += serialize_action(script.actions[i]);
  }
  return out;
}

Verdict validate_syntax(std::string_view text) {
  Verdict verdict;
  std::size_t statements = 0;
  for_each_statement(text, [&](std::string_view line, int line_no) {
    ++statements;
    try {
      (void)to_action(parse_call(line, line_no));
    } catch (const ScriptError& e) {
      verdict.errors.push_back({e.line(), e.kind(), e.detail()});
    }
  });
  if (statements == 0) verdict.errors.push_back({0, ErrorKind::kSyntax, "script contains no statements"});
  return verdict;
}

}  // namespace actbench::script
