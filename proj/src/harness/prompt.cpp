#include <algorithm>
#include <charconv>
#include <numeric>

#include "actbench/harness.hpp"

namespace actbench::harness {

namespace resources {
std::string_view role();
std::string_view api_reference();
std::string_view rules();
}  // namespace resources

std::string_view default_role_preamble() { return resources::role(); }
std::string_view default_api_reference() { return resources::api_reference(); }
std::string_view default_rules() { return resources::rules(); }

std::string_view api_reference_version() {
  const auto text = resources::api_reference();
  return text.substr(0, text.find('\n'));
}

PromptSpec default_prompt_spec() {
  PromptSpec spec;
  spec.role_preamble = std::string(default_role_preamble());
  spec.api_reference = std::string(default_api_reference());
  spec.rules = std::string(default_rules());
  return spec;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void render_elements(std::string& out, const std::vector<UIElement>& elements, const std::vector<bool>& keep) {
  bool any = false;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!keep[i]) continue;
    const auto& e = elements[i];
    out += "- ";
    out += screenparse::to_string(e.kind);
    out += " \"" + e.label + "\" at (" + number(e.center.x) + ", " + number(e.center.y) + ")\n";
    any = true;
  }
  if (!any) out += "(none)\n";
}

// keep[0] masks the task elements, keep[1 + s] those of shot s.
std::string render(const PromptSpec& spec, std::size_t shot_count, const std::vector<std::vector<bool>>& keep) {
  std::string out;
  out += trimmed(spec.role_preamble) + "\n\n";
  out += "# API reference\n" + trimmed(spec.api_reference) + "\n\n";
  if (shot_count > 0) {
    out += "# Examples\n";
    for (std::size_t s = 0; s < shot_count; ++s) {
      const auto& shot = spec.shots[s];
      out += "\n## Example " + std::to_string(s + 1) + "\n";
      out += "Task: " + trimmed(shot.task_text) + "\n";
      out += "Screen elements:\n";
      render_elements(out, shot.elements, keep[1 + s]);
      out += "Script:\n" + trimmed(shot.gold_script) + "\n";
    }
    out += "\n";
  }
  out += "# Screen elements\n";
  render_elements(out, spec.elements, keep[0]);
  out += "\n# Rules\n" + trimmed(spec.rules) + "\n\n";
  out += "# Task\n" + trimmed(spec.task_text) + "\nScript:\n";
  return out;
}

std::vector<std::vector<bool>> keep_all(const PromptSpec& spec) {
  std::vector<std::vector<bool>> keep;
  keep.emplace_back(spec.elements.size(), true);
  for (const auto& shot : spec.shots) keep.emplace_back(shot.elements.size(), true);
  return keep;
}

}  // namespace

std::string render_prompt(const PromptSpec& spec) { return render(spec, spec.shots.size(), keep_all(spec)); }

Prompt build_prompt(const PromptSpec& spec, const TokenEstimator& estimator) {
  Prompt prompt;
  auto keep = keep_all(spec);

  {
    std::vector<std::vector<bool>> none;
    none.emplace_back(spec.elements.size(), false);
    const auto fixed = render(spec, 0, none);
    if (estimator(fixed) > spec.token_budget)
      throw BudgetImpossible("fixed prompt sections need " + std::to_string(estimator(fixed)) +
                             " tokens, budget is " + std::to_string(spec.token_budget));
  }

  // Drop order: ascending confidence; among equals, later elements first.
  struct Slot {
    std::size_t group, index;
    double confidence;
  };
  std::vector<Slot> order;
  for (std::size_t g = 0; g < keep.size(); ++g) {
    const auto& elements = g == 0 ? spec.elements : spec.shots[g - 1].elements;
    for (std::size_t i = 0; i < elements.size(); ++i) order.push_back({g, i, elements[i].confidence});
  }
  std::stable_sort(order.begin(), order.end(), [](const Slot& a, const Slot& b) {
    if (a.confidence != b.confidence) return a.confidence < b.confidence;
    if (a.group != b.group) return a.group > b.group;
    return a.index > b.index;
  });

  auto with_dropped = [&](std::size_t d) {
    auto k = keep_all(spec);
    for (std::size_t i = 0; i < d; ++i) k[order[i].group][order[i].index] = false;
    return k;
  };
  auto fits = [&](std::size_t d, std::size_t shots) {
    return estimator(render(spec, shots, with_dropped(d))) <= spec.token_budget;
  };

  std::size_t shots = spec.shots.size();
  std::size_t dropped = 0;
  if (!fits(0, shots)) {
    // Token count only shrinks as elements go, so bisect the smallest drop.
    std::size_t lo = 1, hi = order.size();
    if (fits(hi, shots)) {
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (fits(mid, shots)) hi = mid;
        else lo = mid + 1;
      }
      dropped = lo;
    } else {
      dropped = order.size();
      while (shots > 0 && !fits(dropped, shots)) --shots;
    }
  }

  prompt.text = render(spec, shots, with_dropped(dropped));
  prompt.tokens = estimator(prompt.text);
  prompt.dropped_elements = dropped;
  prompt.dropped_shots = spec.shots.size() - shots;
  return prompt;
}

}  // namespace actbench::harness
