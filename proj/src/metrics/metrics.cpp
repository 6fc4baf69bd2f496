#include "actbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "actbench/bleu.hpp"

namespace actbench::metrics {

using script::ActionFamily;
using script::ActionScript;

namespace {

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

void check_gold(std::span<const GoldAction> gold) {
  if (gold.empty()) throw MissingGoldPayload("gold sequence is empty");
  for (std::size_t j = 0; j < gold.size(); ++j) {
    const auto& g = gold[j];
    switch (g.action.family()) {
      case ActionFamily::kMouse:
        if (!g.target_box)
          throw MissingGoldPayload("gold action " + std::to_string(j + 1) + " (" +
                                   std::string(script::to_string(g.action.name)) + ") has no target box");
        break;
      case ActionFamily::kKey:
        if (!g.gold_keys) throw MissingGoldPayload("gold action " + std::to_string(j + 1) + " has no key set");
        break;
      case ActionFamily::kWrite:
        if (!g.gold_text) throw MissingGoldPayload("gold action " + std::to_string(j + 1) + " has no text");
        break;
      case ActionFamily::kScroll:
        break;
    }
  }
}

}  // namespace

GoldAction GoldAction::from_action(script::Action action, std::optional<Rect> target_box) {
  GoldAction g;
  switch (action.family()) {
    case ActionFamily::kMouse:
      g.target_box = target_box;
      break;
    case ActionFamily::kKey:
      g.gold_keys = action.key_list();
      break;
    case ActionFamily::kWrite:
      g.gold_text = action.text();
      break;
    case ActionFamily::kScroll:
      break;
  }
  g.action = std::move(action);
  return g;
}

double max_seq_score(std::size_t gold_length) {
  if (gold_length == 0) return 0.0;
  return kBeta1 + kBeta2 * static_cast<double>(gold_length - 1);
}

double seq_score(const ActionScript& predicted, std::span<const GoldAction> gold) {
  if (predicted.actions.empty() || gold.empty() || predicted.actions.size() != gold.size()) return 0.0;
  for (std::size_t j = 0; j < gold.size(); ++j)
    if (predicted.actions[j].name != gold[j].action.name) return 0.0;
  return max_seq_score(gold.size());
}

bool is_degenerate(const Rect& r) { return r.diagonal() == 0.0; }

double click_penalty(Coordinate predicted, const Rect& target, double alpha, double seq_score) {
  if (seq_score <= 0.0) return alpha;
  const double diagonal = is_degenerate(target) ? std::numbers::sqrt2 : target.diagonal();
  const double mu = 1.0 / diagonal;
  const double l2 = dist_to_rect(predicted, target);
  return alpha * (1.0 - mu / (mu + l2));
}

double key_penalty(const script::KeyList& predicted, const script::KeyList& gold, double alpha, double seq_score) {
  const std::set<std::string> p(predicted.begin(), predicted.end());
  const std::set<std::string> g(gold.begin(), gold.end());
  return (p == g && seq_score > 0.0) ? 0.0 : alpha;
}

double text_similarity(std::string_view predicted, std::string_view gold) {
  const auto cand = tokenize(predicted);
  const auto ref = tokenize(gold);
  if (cand.empty() && ref.empty()) return predicted == gold ? 1.0 : 0.0;
  return bleu(cand, ref);
}

double write_penalty(std::string_view predicted, std::string_view gold, double alpha, double seq_score,
                     WriteGate gate) {
  const double threshold = gate == WriteGate::kStrictPaper ? 1.0 : 0.0;
  if (seq_score > threshold) return alpha * (1.0 - text_similarity(predicted, gold));
  return alpha;
}

EpisodeScore score_unparsed(std::span<const GoldAction> gold) {
  check_gold(gold);
  EpisodeScore e;
  e.gold_length = gold.size();
  e.max_seq_score = max_seq_score(gold.size());
  return e;
}

EpisodeScore score_episode(const ActionScript& predicted, std::span<const GoldAction> gold,
                           const ScoringOptions& options) {
  EpisodeScore e = score_unparsed(gold);
  e.seq_score = seq_score(predicted, gold);
  e.alpha = e.seq_score / static_cast<double>(gold.size());
  if (e.seq_score <= 0.0) return e;

  for (std::size_t j = 0; j < gold.size(); ++j) {
    const auto& g = gold[j];
    const auto& p = predicted.actions[j];
    switch (g.action.family()) {
      case ActionFamily::kMouse:
        if (is_degenerate(*g.target_box))
          e.warnings.push_back("gold action " + std::to_string(j + 1) + " has a zero-size box " +
                               to_string(*g.target_box) + "; scored as a 1x1 box");
        e.click_penalty += click_penalty(p.coordinate(), *g.target_box, e.alpha, e.seq_score);
        break;
      case ActionFamily::kKey:
        e.key_penalty += key_penalty(p.key_list(), *g.gold_keys, e.alpha, e.seq_score);
        break;
      case ActionFamily::kWrite:
        e.write_penalty += write_penalty(p.text(), *g.gold_text, e.alpha, e.seq_score, options.write_gate);
        break;
      case ActionFamily::kScroll:
        break;
    }
  }
  e.clamped_contribution = std::max(e.seq_score - e.total_penalty(), 0.0);
  return e;
}

double action_score(std::span<const EpisodeScore> episodes, Normalization normalization) {
  std::vector<double> numerators;
  std::vector<double> denominators;
  numerators.reserve(episodes.size());
  denominators.reserve(episodes.size());
  for (const auto& e : episodes) {
    numerators.push_back(e.clamped_contribution);
    denominators.push_back(normalization == Normalization::kGoldMaximum ? e.max_seq_score : e.seq_score);
  }
  const double denominator = sorted_sum(std::move(denominators));
  if (denominator <= 0.0) return 0.0;
  return std::clamp(sorted_sum(std::move(numerators)) / denominator, 0.0, 1.0);
}

ScoreSummary summarize(std::span<const ScoredEpisode> episodes, Normalization normalization) {
  ScoreSummary s;
  s.episodes = episodes.size();
  std::vector<double> seq, click, key, write;
  std::vector<EpisodeScore> scores;
  scores.reserve(episodes.size());
  for (const auto& ep : episodes) {
    if (ep.status == PredictionStatus::kParseFailure) ++s.parse_failures;
    if (ep.status == PredictionStatus::kMissing) ++s.missing;
    seq.push_back(ep.score.seq_score);
    click.push_back(ep.score.click_penalty);
    key.push_back(ep.score.key_penalty);
    write.push_back(ep.score.write_penalty);
    scores.push_back(ep.score);
  }
  s.seq_score_sum = sorted_sum(std::move(seq));
  s.click_penalty_sum = sorted_sum(std::move(click));
  s.key_penalty_sum = sorted_sum(std::move(key));
  s.write_penalty_sum = sorted_sum(std::move(write));
  if (s.episodes > 0) {
    const auto n = static_cast<double>(s.episodes);
    s.seq_score_mean = s.seq_score_sum / n;
    s.click_penalty_mean = s.click_penalty_sum / n;
    s.key_penalty_mean = s.key_penalty_sum / n;
    s.write_penalty_mean = s.write_penalty_sum / n;
  }
  s.action_score = action_score(scores, normalization);
  return s;
}

ScoreReport make_report(std::string label, std::vector<ScoredEpisode> episodes, const ScoringOptions& options) {
  ScoreReport report;
  report.label = std::move(label);
  report.options = options;
  std::sort(episodes.begin(), episodes.end(),
            [](const ScoredEpisode& a, const ScoredEpisode& b) { return a.task_id < b.task_id; });
  report.episodes = std::move(episodes);
  report.overall = summarize(report.episodes, options.normalization);

  std::map<std::string, std::vector<ScoredEpisode>> groups;
  for (const auto& ep : report.episodes) groups[ep.platform].push_back(ep);
  for (const auto& [platform, group] : groups) report.by_platform[platform] = summarize(group, options.normalization);
  return report;
}

}  // namespace actbench::metrics
