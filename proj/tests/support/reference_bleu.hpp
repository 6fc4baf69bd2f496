#pragma once

// Test-only reference BLEU, written separately from the library version.
// Counts n-grams as token vectors in an ordered map and accumulates the
// precision product directly instead of summing logs.

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace actbench::testkit {

inline double reference_bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  double product = 1.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int> hyp_grams;
    std::map<std::vector<std::string>, int> ref_grams;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i)
      hyp_grams[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)] += 1;
    for (std::size_t i = 0; i + n <= ref.size(); ++i)
      ref_grams[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)] += 1;
    int clipped = 0;
    int possible = hyp.size() >= n ? static_cast<int>(hyp.size() - n + 1) : 0;
    for (auto& [gram, c] : hyp_grams) {
      int in_ref = ref_grams.count(gram) ? ref_grams[gram] : 0;
      clipped += c < in_ref ? c : in_ref;
    }
    double p = clipped > 0 ? double(clipped) / double(possible) : 1.0 / double(possible + 1);
    product *= p;
  }
  double geo = std::pow(product, 0.25);
  double bp = hyp.size() > ref.size() ? 1.0 : std::exp(1.0 - double(ref.size()) / double(hyp.size()));
  return bp * geo;
}

// Whitespace split, lower-case, strip surrounding punctuation unless the
// token is nothing but punctuation.
inline std::vector<std::string> reference_tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    std::string t = b == e ? cur : cur.substr(b, e - b);
    for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(t);
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) flush();
    else cur.push_back(ch);
  }
  flush();
  return out;
}

}  // namespace actbench::testkit
