#include <cmath>

#include "ngram.hpp"
#include "ssbench/error.hpp"
#include "ssbench/metrics.hpp"

namespace ssbench::metrics {

using detail::clipped_overlap;
using detail::count_ngrams;
using detail::NgramCounts;

double bleu4(const TokenSequence& candidate, std::span<const TokenSequence> references) {
  if (references.empty()) throw ValidationError("EmptyReferences", "bleu4 needs at least one reference");
  const std::size_t c = candidate.size();
  if (c == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramCounts cand = count_ngrams(candidate.tokens, n);
    // Clip each candidate n-gram by its maximum count in any one reference.
    NgramCounts max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, count] : count_ngrams(ref.tokens, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    const std::size_t total = c >= n ? c - n + 1 : 0;
    const std::size_t matches = clipped_overlap(cand, max_ref);
    double p = matches == 0 ? 1.0 / static_cast<double>(total + 1)
                            : static_cast<double>(matches) / static_cast<double>(total);
    log_sum += std::log(p);
  }

  std::size_t r = references.front().size();
  for (const auto& ref : references) {
    const auto d_new = ref.size() > c ? ref.size() - c : c - ref.size();
    const auto d_old = r > c ? r - c : c - r;
    if (d_new < d_old || (d_new == d_old && ref.size() < r)) r = ref.size();
  }
  const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  return bp * std::exp(log_sum / 4.0);
}

}  // namespace ssbench::metrics
