#pragma once

// Sequence Score, the click/key/write penalties and the aggregate Action
// Score.
//
//   SeqScore_i = 0.1 + 1 * (s - 1)   when every action name matches the gold
//                                     sequence position-wise, else 0
//   alpha_i    = SeqScore_i / s
//   M          = alpha * (1 - mu / (mu + L2)), mu = 1 / box diagonal
//   K          = alpha * [key sets differ]
//   W          = alpha * (1 - BLEU(gold text, predicted text))
//   AS         = sum_i max(SeqScore_i - sum_j (M + K + W), 0) / sum_i SeqScore_i
//
// When SeqScore_i is 0 the gated branches collapse to alpha * 1 = 0, so a
// mismatched episode contributes nothing.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actbench/geometry.hpp"
#include "actbench/script.hpp"

namespace actbench::metrics {

inline constexpr double kBeta1 = 0.1;
inline constexpr double kBeta2 = 1.0;

struct GoldAction {
  script::Action action;
  std::optional<Rect> target_box;          // mouse family
  std::optional<script::KeyList> gold_keys;  // press / hotkey
  std::optional<std::string> gold_text;    // write

  // Fills the key/text payload from the action itself. target_box is only
  // kept for mouse-family actions.
  static GoldAction from_action(script::Action action, std::optional<Rect> target_box = std::nullopt);
};

class MissingGoldPayload : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gate applied to the BLEU branch of the write penalty.
enum class WriteGate {
  kPositive,     // SeqScore > 0, consistent with the click and key penalties
  kStrictPaper,  // SeqScore > 1, as printed in the original formula
};

// Denominator of the Action Score.
enum class Normalization {
  kPredicted,    // sum of achieved sequence scores
  kGoldMaximum,  // sum of the best achievable sequence score per episode
};

struct ScoringOptions {
  WriteGate write_gate = WriteGate::kPositive;
  Normalization normalization = Normalization::kPredicted;
};

struct EpisodeScore {
  double seq_score = 0.0;
  double click_penalty = 0.0;
  double key_penalty = 0.0;
  double write_penalty = 0.0;
  double alpha = 0.0;
  double clamped_contribution = 0.0;
  std::size_t gold_length = 0;
  double max_seq_score = 0.0;
  std::vector<std::string> warnings;

  double total_penalty() const { return click_penalty + key_penalty + write_penalty; }
};

double max_seq_score(std::size_t gold_length);

double seq_score(const script::ActionScript& predicted, std::span<const GoldAction> gold);

// True when the box diagonal is 0; such boxes are scored as 1x1 pixel boxes.
bool is_degenerate(const Rect& r);

double click_penalty(Coordinate predicted, const Rect& target, double alpha, double seq_score);
double key_penalty(const script::KeyList& predicted, const script::KeyList& gold, double alpha,
                   double seq_score);

// BLEU of the predicted text against the gold text on the shared tokenizer.
// Whitespace-only strings tokenize to nothing and compare verbatim.
double text_similarity(std::string_view predicted, std::string_view gold);

double write_penalty(std::string_view predicted, std::string_view gold, double alpha, double seq_score,
                     WriteGate gate = WriteGate::kPositive);

// Throws MissingGoldPayload when a gold mouse action has no target box, or
// when gold is empty.
EpisodeScore score_episode(const script::ActionScript& predicted, std::span<const GoldAction> gold,
                           const ScoringOptions& options = {});

// Score for an episode whose prediction could not be parsed or is missing.
EpisodeScore score_unparsed(std::span<const GoldAction> gold);

// 0 when the denominator is 0.
double action_score(std::span<const EpisodeScore> episodes, Normalization normalization = Normalization::kPredicted);

// --- Aggregated report ---------------------------------------------------

enum class PredictionStatus { kParsed, kParseFailure, kMissing };

struct ScoredEpisode {
  std::string task_id;
  std::string platform;
  PredictionStatus status = PredictionStatus::kParsed;
  EpisodeScore score;
};

struct ScoreSummary {
  std::size_t episodes = 0;
  std::size_t parse_failures = 0;
  std::size_t missing = 0;
  double seq_score_sum = 0.0;
  double seq_score_mean = 0.0;
  double click_penalty_sum = 0.0;
  double key_penalty_sum = 0.0;
  double write_penalty_sum = 0.0;
  double click_penalty_mean = 0.0;
  double key_penalty_mean = 0.0;
  double write_penalty_mean = 0.0;
  double action_score = 0.0;
};

struct ScoreReport {
  std::string label;  // backend or run name
  ScoringOptions options;
  std::vector<ScoredEpisode> episodes;  // sorted by task id
  ScoreSummary overall;
  std::map<std::string, ScoreSummary> by_platform;
};

// Sums are taken over sorted values so the result does not depend on the
// order episodes arrive in.
ScoreSummary summarize(std::span<const ScoredEpisode> episodes, Normalization normalization);
ScoreReport make_report(std::string label, std::vector<ScoredEpisode> episodes, const ScoringOptions& options);

}  // namespace actbench::metrics
