#include <sstream>

#include "actbench/harness.hpp"

namespace actbench::harness {

namespace {

std::string_view strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_fence(std::string_view line) { return line.starts_with("```") || line.starts_with("~~~"); }

bool is_import(std::string_view line) {
  return line == "import pyautogui" || line.starts_with("import pyautogui ") || line.starts_with("from pyautogui ");
}

std::optional<script::Action> statement(std::string_view line, int line_no) {
  try {
    return script::to_action(script::parse_call(line, line_no));
  } catch (const script::ScriptError&) {
    return std::nullopt;
  }
}

}  // namespace

Extraction extract_script(std::string_view completion) {
  Extraction out;
  script::ActionScript result;
  bool in_run = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= completion.size()) {
    auto nl = completion.find('\n', pos);
    if (nl == std::string_view::npos) nl = completion.size();
    const auto line = strip(completion.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;

    if (is_fence(line)) {
      if (in_run) break;
      continue;
    }
    if (line.empty() || line.starts_with('#') || is_import(line)) continue;
    auto action = statement(line, line_no);
    if (!action) {
      if (in_run) break;
      continue;
    }
    in_run = true;
    result.actions.push_back(std::move(*action));
    if (!result.source_text.empty()) result.source_text += '\n';
    result.source_text += line;
  }
  if (result.actions.empty()) {
    out.failure = "no valid pyautogui statement in output";
    return out;
  }
  out.script = std::move(result);
  return out;
}

}  // namespace actbench::harness
