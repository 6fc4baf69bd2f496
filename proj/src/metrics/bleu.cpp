#include "actbench/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace actbench::metrics {

namespace {

constexpr int kMaxOrder = 4;

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const Tokens& tokens, std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) != 0) ++i;
    std::size_t start = i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) == 0) ++i;
    if (start == i) break;
    std::string_view raw = text.substr(start, i - start);
    std::string_view core = raw;
    while (!core.empty() && is_punct(core.front())) core.remove_prefix(1);
    while (!core.empty() && is_punct(core.back())) core.remove_suffix(1);
    if (core.empty()) core = raw;
    std::string token(core);
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tokens.push_back(std::move(token));
  }
  return tokens;
}

double bleu(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;

  double log_sum = 0.0;
  for (int order = 1; order <= kMaxOrder; ++order) {
    const auto cand = count_ngrams(candidate, order);
    const auto ref = count_ngrams(reference, order);
    long matches = 0;
    long total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matches += std::min(count, it->second);
    }
    double precision = matches == 0 ? 1.0 / static_cast<double>(total + 1)
                                    : static_cast<double>(matches) / static_cast<double>(total);
    log_sum += std::log(precision) / kMaxOrder;
  }

  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::clamp(brevity * std::exp(log_sum), 0.0, 1.0);
}

}  // namespace actbench::metrics
