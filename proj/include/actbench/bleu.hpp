#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace actbench::metrics {

using Tokens = std::vector<std::string>;

// Lower-cases, splits on whitespace and strips leading/trailing ASCII
// punctuation from each token. Tokens made only of punctuation are kept
// verbatim so that strings like "!!!" still compare.
Tokens tokenize(std::string_view text);

// Sentence BLEU against a single reference: geometric mean of clipped
// n-gram precisions for n = 1..4 with uniform weights, times the brevity
// penalty. A precision whose clipped match count is 0 (including orders with
// no candidate n-grams) is smoothed to (matches + 1) / (total + 1).
// An empty candidate or empty reference scores 0.
double bleu(const Tokens& candidate, const Tokens& reference);

}  // namespace actbench::metrics
