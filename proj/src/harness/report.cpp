#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "actbench/harness.hpp"

namespace actbench::harness {

using json = nlohmann::json;

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "table") return ReportFormat::kTable;
  return std::nullopt;
}

namespace {

std::string_view status_name(metrics::PredictionStatus s) {
  switch (s) {
    case metrics::PredictionStatus::kParsed: return "parsed";
    case metrics::PredictionStatus::kParseFailure: return "parse_failure";
    case metrics::PredictionStatus::kMissing: return "missing";
  }
  return "?";
}

json summary_json(const metrics::ScoreSummary& s) {
  return {{"episodes", s.episodes},
          {"parse_failures", s.parse_failures},
          {"missing", s.missing},
          {"SS", s.seq_score_mean},
          {"M_p", s.click_penalty_mean},
          {"K_p", s.key_penalty_mean},
          {"W_p", s.write_penalty_mean},
          {"AS", s.action_score},
          {"seq_score_sum", s.seq_score_sum},
          {"click_penalty_sum", s.click_penalty_sum},
          {"key_penalty_sum", s.key_penalty_sum},
          {"write_penalty_sum", s.write_penalty_sum}};
}

std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

struct Row {
  std::string model, platform;
  const metrics::ScoreSummary* summary;
};

std::vector<Row> rows(const std::vector<metrics::ScoreReport>& reports, bool per_platform) {
  std::vector<Row> out;
  for (const auto& r : reports) {
    if (r.overall.episodes == 0) continue;
    out.push_back({r.label, "all", &r.overall});
    if (per_platform)
      for (const auto& [platform, s] : r.by_platform) out.push_back({r.label, platform, &s});
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string render_report(const std::vector<metrics::ScoreReport>& reports, ReportFormat format,
                          const RenderOptions& options) {
  const int p = options.precision;
  switch (format) {
    case ReportFormat::kJson: {
      json all = json::array();
      for (const auto& r : reports) {
        json j = {{"label", r.label},
                  {"write_gate", r.options.write_gate == metrics::WriteGate::kPositive ? "positive" : "strict"},
                  {"normalization",
                   r.options.normalization == metrics::Normalization::kPredicted ? "predicted" : "gold_maximum"},
                  {"overall", summary_json(r.overall)}};
        json platforms = json::object();
        for (const auto& [platform, s] : r.by_platform) platforms[platform] = summary_json(s);
        j["by_platform"] = platforms;
        json episodes = json::array();
        for (const auto& e : r.episodes)
          episodes.push_back({{"task_id", e.task_id},
                              {"platform", e.platform},
                              {"status", status_name(e.status)},
                              {"seq_score", e.score.seq_score},
                              {"alpha", e.score.alpha},
                              {"click_penalty", e.score.click_penalty},
                              {"key_penalty", e.score.key_penalty},
                              {"write_penalty", e.score.write_penalty},
                              {"contribution", e.score.clamped_contribution},
                              {"warnings", e.score.warnings}});
        j["episodes"] = episodes;
        all.push_back(j);
      }
      return json{{"reports", all}}.dump(2) + "\n";
    }
    case ReportFormat::kCsv: {
      std::ostringstream os;
      os << "model,platform,episodes,parse_failures,missing,SS,M_p,K_p,W_p,AS\n";
      for (const auto& row : rows(reports, options.per_platform)) {
        const auto& s = *row.summary;
        os << csv_field(row.model) << ',' << csv_field(row.platform) << ',' << s.episodes << ',' << s.parse_failures
           << ',' << s.missing << ',' << fixed(s.seq_score_mean, p) << ',' << fixed(s.click_penalty_mean, p) << ','
           << fixed(s.key_penalty_mean, p) << ',' << fixed(s.write_penalty_mean, p) << ','
           << fixed(s.action_score, p) << '\n';
      }
      return os.str();
    }
    case ReportFormat::kTable: {
      const auto all = rows(reports, options.per_platform);
      std::size_t label_width = 5;
      for (const auto& row : all)
        label_width = std::max(label_width, row.platform == "all" ? row.model.size() : row.platform.size() + 2);
      std::size_t col = static_cast<std::size_t>(std::max(6, p + 4));
      std::ostringstream os;
      os << std::left << std::setw(int(label_width)) << "Model";
      for (const char* h : {"SS", "M_p", "K_p", "W_p", "AS"}) os << "  " << std::right << std::setw(int(col)) << h;
      os << '\n';
      for (const auto& row : all) {
        const auto& s = *row.summary;
        const std::string label = row.platform == "all" ? row.model : "  " + row.platform;
        os << std::left << std::setw(int(label_width)) << label;
        for (double v : {s.seq_score_mean, s.click_penalty_mean, s.key_penalty_mean, s.write_penalty_mean,
                         s.action_score})
          os << "  " << std::right << std::setw(int(col)) << fixed(v, p);
        os << '\n';
      }
      return os.str();
    }
  }
  return {};
}

}  // namespace actbench::harness
