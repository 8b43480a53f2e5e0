#include <algorithm>

#include "ssbench/error.hpp"
#include "ngram.hpp"
#include "ssbench/metrics.hpp"

namespace ssbench::metrics {

using detail::clipped_overlap;
using detail::count_ngrams;
using detail::NgramCounts;

PrfScore make_prf(double precision, double recall) {
  PrfScore s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

namespace {

// f1 = 2k / (m + n), one rounding step.
PrfScore ratio_prf(std::size_t k, std::size_t m, std::size_t n) {
  PrfScore s{static_cast<double>(k) / static_cast<double>(m), static_cast<double>(k) / static_cast<double>(n), 0.0};
  if (k > 0) s.f1 = 2.0 * static_cast<double>(k) / static_cast<double>(m + n);
  return s;
}

}  // namespace

PrfScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n) {
  if (n < 1 || n > 4) throw ValidationError("InvalidN", "rouge_n supports 1 <= n <= 4, got " + std::to_string(n));
  const auto un = static_cast<std::size_t>(n);
  if (candidate.size() < un || reference.size() < un) return {};
  const std::size_t cand_total = candidate.size() - un + 1;
  const std::size_t ref_total = reference.size() - un + 1;
  const std::size_t overlap = clipped_overlap(count_ngrams(candidate.tokens, un), count_ngrams(reference.tokens, un));
  return ratio_prf(overlap, cand_total, ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  // Two-row DP table, O(|a|*|b|) time and O(|b|) space.
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

PrfScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) return {};
  return ratio_prf(lcs_length(candidate.tokens, reference.tokens), candidate.size(), reference.size());
}

NearestMatch nearest_seed_similarity(const TokenSequence& item, std::span<const TokenSequence> pool) {
  if (pool.empty()) throw ValidationError("EmptyPool", "nearest_seed_similarity needs a non-empty pool");
  NearestMatch best{rouge_l(item, pool[0]).f1, 0};
  for (std::size_t i = 1; i < pool.size(); ++i) {
    const double f = rouge_l(item, pool[i]).f1;
    if (f > best.score) best = {f, i};
  }
  return best;
}

}  // namespace ssbench::metrics
