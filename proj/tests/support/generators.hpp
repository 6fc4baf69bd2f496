#pragma once

// Random generators for property tests. Deterministic given the engine seed.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "actbench/metrics.hpp"
#include "actbench/script.hpp"
#include "metric_oracle.hpp"

namespace actbench::testkit {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline const std::vector<std::string>& key_pool() {
  static const std::vector<std::string> keys = {"ctrl", "shift", "alt", "command", "enter", "tab", "c", "v",
                                                "a",    "z",     "f4",  "esc",     "up",    "down", "space"};
  return keys;
}

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {"the",   "cat",    "sat",   "on",     "mat",   "paris",
                                                 "hello", "world",  "Order", "pizza",  "from",  "john",
                                                 "new",   "york",   "flight", "hotel", "2024",  "search",
                                                 "a",     "report", "it's",  "done!", "\"ok\"", "..."};
  return words;
}

inline std::string random_sentence(Rng& rng, int min_words = 1, int max_words = 8) {
  const auto& words = word_pool();
  int n = uniform_int(rng, min_words, max_words);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s.push_back(' ');
    s += words[uniform_int(rng, 0, int(words.size()) - 1)];
  }
  return s;
}

inline std::string mutate_sentence(Rng& rng, const std::string& base) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : base) {
    if (c == ' ') { toks.push_back(cur); cur.clear(); }
    else cur.push_back(c);
  }
  toks.push_back(cur);
  int edits = uniform_int(rng, 0, 3);
  const auto& words = word_pool();
  for (int e = 0; e < edits; ++e) {
    int op = uniform_int(rng, 0, 2);
    if (op == 0 && toks.size() > 1) toks.erase(toks.begin() + uniform_int(rng, 0, int(toks.size()) - 1));
    else if (op == 1) toks.insert(toks.begin() + uniform_int(rng, 0, int(toks.size())), words[uniform_int(rng, 0, int(words.size()) - 1)]);
    else toks[uniform_int(rng, 0, int(toks.size()) - 1)] = words[uniform_int(rng, 0, int(words.size()) - 1)];
  }
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out.empty() ? "x" : out;
}

inline script::KeyList random_keys(Rng& rng, std::size_t n) {
  auto pool = key_pool();
  std::shuffle(pool.begin(), pool.end(), rng);
  return script::KeyList(pool.begin(), pool.begin() + static_cast<long>(n));
}

inline script::ActionName random_name(Rng& rng) {
  return script::kAllActions[uniform_int(rng, 0, int(script::kAllActions.size()) - 1)];
}

// Coordinates are sometimes decimal to exercise exact literal round trips.
inline double random_coordinate(Rng& rng, double hi) {
  if (coin(rng, 0.7)) return double(uniform_int(rng, 0, int(hi)));
  return std::round(uniform_real(rng, 0.0, hi) * 1000.0) / 1000.0;
}

inline script::Action random_action(Rng& rng, script::ActionName name) {
  using script::Action;
  using script::ActionFamily;
  switch (script::family_of(name)) {
    case ActionFamily::kMouse:
      return Action::mouse(name, {random_coordinate(rng, 1920), random_coordinate(rng, 1080)});
    case ActionFamily::kScroll:
      return Action::scroll(name, uniform_int(rng, -50, 50));
    case ActionFamily::kKey:
      return Action::keys(name, random_keys(rng, name == script::ActionName::kPress ? 1 : uniform_int(rng, 2, 4)));
    case ActionFamily::kWrite: {
      std::string text = random_sentence(rng);
      if (coin(rng, 0.2)) text += coin(rng) ? "\n" : " it's \\ \"quoted\"";
      return Action::write(text);
    }
  }
  return Action::mouse(name, {0, 0});
}

inline script::ActionScript random_script(Rng& rng, int max_len = 6) {
  script::ActionScript s;
  int n = uniform_int(rng, 1, max_len);
  for (int i = 0; i < n; ++i) s.actions.push_back(random_action(rng, random_name(rng)));
  return s;
}

// Ensures every action family appears when cycling through `index`.
inline script::ActionScript covering_script(Rng& rng, std::size_t index) {
  auto s = random_script(rng);
  s.actions[0] = random_action(rng, script::kAllActions[index % script::kAllActions.size()]);
  return s;
}

struct GeneratedEpisode {
  script::ActionScript predicted;
  std::vector<metrics::GoldAction> gold;
  OracleEpisode oracle;
};

inline OracleStep to_oracle_step(const script::Action& a) {
  OracleStep step;
  step.name = std::string(script::to_string(a.name));
  switch (a.family()) {
    case script::ActionFamily::kMouse: step.x = a.coordinate().x; step.y = a.coordinate().y; break;
    case script::ActionFamily::kKey: step.keys = a.key_list(); break;
    case script::ActionFamily::kWrite: step.text = a.text(); break;
    case script::ActionFamily::kScroll: break;
  }
  return step;
}

inline Rect random_box(Rng& rng) {
  double x0 = uniform_int(rng, 0, 1800), y0 = uniform_int(rng, 0, 1000);
  if (coin(rng, 0.02)) return Rect{x0, y0, x0, y0};
  return Rect{x0, y0, x0 + uniform_int(rng, 1, 300), y0 + uniform_int(rng, 1, 200)};
}

inline GeneratedEpisode random_episode(Rng& rng, int min_len = 1, int max_len = 3) {
  GeneratedEpisode ep;
  int n = uniform_int(rng, min_len, max_len);
  for (int j = 0; j < n; ++j) {
    auto name = random_name(rng);
    auto action = random_action(rng, name);
    std::optional<Rect> box;
    OracleStep step = to_oracle_step(action);
    if (action.family() == script::ActionFamily::kMouse) {
      box = random_box(rng);
      step.box_x0 = box->x_min; step.box_y0 = box->y_min; step.box_x1 = box->x_max; step.box_y1 = box->y_max;
    }
    ep.gold.push_back(metrics::GoldAction::from_action(action, box));
    ep.oracle.gold.push_back(step);
  }

  // Prediction: usually the same action names with perturbed payloads.
  int mode = uniform_int(rng, 0, 9);
  if (mode < 7) {
    for (const auto& g : ep.gold) {
      script::Action p = g.action;
      switch (p.family()) {
        case script::ActionFamily::kMouse: {
          const Rect& b = *g.target_box;
          if (coin(rng, 0.4)) p.args = Coordinate{uniform_real(rng, b.x_min, b.x_max), uniform_real(rng, b.y_min, b.y_max)};
          else p.args = Coordinate{std::max(0.0, b.x_min + uniform_real(rng, -400, 700)), std::max(0.0, b.y_min + uniform_real(rng, -400, 500))};
          break;
        }
        case script::ActionFamily::kKey:
          if (coin(rng, 0.5)) {
            auto keys = p.key_list();
            std::shuffle(keys.begin(), keys.end(), rng);
            p.args = keys;
          } else {
            p.args = random_keys(rng, p.key_list().size());
          }
          break;
        case script::ActionFamily::kWrite:
          p.args = coin(rng, 0.3) ? p.text() : mutate_sentence(rng, p.text());
          break;
        case script::ActionFamily::kScroll:
          p.args = std::int64_t{uniform_int(rng, -10, 10)};
          break;
      }
      ep.predicted.actions.push_back(p);
    }
  } else if (mode < 9) {
    ep.predicted = random_script(rng, 3);
  }
  // mode 9: unparsable prediction (left empty)
  for (const auto& a : ep.predicted.actions) ep.oracle.predicted.push_back(to_oracle_step(a));
  return ep;
}

}  // namespace actbench::testkit
