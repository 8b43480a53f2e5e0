#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssbench::metrics {

enum class TokenMode { words, lowercase_words };

struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// f1 is the harmonic mean, 0 when p + r == 0.
PrfScore make_prf(double precision, double recall);

// words: split on Unicode whitespace. lowercase_words: additionally ASCII
// lowercase and strip leading/trailing punctuation; tokens left empty are
// dropped.
TokenSequence tokenize(std::string_view text, TokenMode mode = TokenMode::lowercase_words);

// A token together with its byte range in the source text.
struct TokenSpan {
  std::string token;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// lowercase_words tokenization that keeps byte offsets into `text`
// (offsets cover the token after punctuation stripping).
std::vector<TokenSpan> tokenize_with_offsets(std::string_view text);

std::size_t word_count(std::string_view text);

// Clipped n-gram overlap, 1 <= n <= 4. Throws ValidationError otherwise.
PrfScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

PrfScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

// BLEU-4 with smoothing-1: an order with zero clipped matches uses
// (0 + 1) / (total + 1). Brevity penalty against the closest reference
// length (shorter wins ties). Empty candidate scores 0.
double bleu4(const TokenSequence& candidate, std::span<const TokenSequence> references);

struct NearestMatch {
  double score = 0.0;
  std::size_t index = 0;
};

// Max ROUGE-L F1 over the pool; ties resolve to the smallest index.
NearestMatch nearest_seed_similarity(const TokenSequence& item, std::span<const TokenSequence> pool);

}  // namespace ssbench::metrics
