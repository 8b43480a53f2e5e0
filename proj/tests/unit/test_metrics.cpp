#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ssbench/error.hpp"
#include "ssbench/metrics.hpp"

using namespace ssbench;
using namespace ssbench::metrics;

namespace {

TokenSequence seq(std::initializer_list<const char*> words) {
  TokenSequence s;
  for (auto* w : words) s.tokens.emplace_back(w);
  return s;
}

bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& of) {
  std::size_t j = 0;
  for (const auto& t : of) {
    if (j < sub.size() && sub[j] == t) ++j;
  }
  return j == sub.size();
}

// Every subsequence of `a` (2^|a| masks), keep the longest found in `b`.
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

std::vector<std::vector<std::string>> grams(const std::vector<std::string>& t, std::size_t n) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
  return out;
}

// Greedy one-to-one pairing of equal n-grams.
std::size_t brute_overlap(const std::vector<std::vector<std::string>>& c,
                          const std::vector<std::vector<std::string>>& r) {
  std::vector<bool> used(r.size(), false);
  std::size_t hits = 0;
  for (const auto& g : c) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!used[j] && r[j] == g) {
        used[j] = true;
        ++hits;
        break;
      }
    }
  }
  return hits;
}

PrfScore oracle_prf(std::size_t hits, std::size_t cand_total, std::size_t ref_total) {
  if (cand_total == 0 || ref_total == 0) return {};
  double p = static_cast<double>(hits) / static_cast<double>(cand_total);
  double r = static_cast<double>(hits) / static_cast<double>(ref_total);
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

std::vector<std::string> random_tokens(std::mt19937_64& rng) {
  static const char* vocab[] = {"a", "b", "c", "d"};
  std::size_t len = rng() % 7;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) out.emplace_back(vocab[rng() % 4]);
  return out;
}

}  // namespace

TEST_CASE("tokenize lowercases and strips edge punctuation") {
  auto t = tokenize("Hello, World!  \"It's\" fine...");
  CHECK(t.tokens == std::vector<std::string>{"hello", "world", "it's", "fine"});
  auto raw = tokenize("Hello, World!", TokenMode::words);
  CHECK(raw.tokens == std::vector<std::string>{"Hello,", "World!"});
  CHECK(tokenize(" -- ... ").empty());
  CHECK(word_count("one two\tthree\nfour") == 4);
}

TEST_CASE("tokenize splits on unicode spaces and keeps offsets") {
  std::string text = "Sam\xC2\xA0waves \xE2\x80\x9Chi\xE2\x80\x9D.";
  auto spans = tokenize_with_offsets(text);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].token == "sam");
  CHECK(spans[2].token == "hi");
  CHECK(text.substr(spans[2].begin, spans[2].end - spans[2].begin) == "hi");
}

TEST_CASE("LCS and ROUGE match brute-force oracles on random short sequences") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = random_tokens(rng);
    auto b = random_tokens(rng);
    CAPTURE(trial);
    CHECK(lcs_length(a, b) == brute_lcs(a, b));

    TokenSequence ca{a}, rb{b};
    auto l = rouge_l(ca, rb);
    auto lo = oracle_prf(brute_lcs(a, b), a.size(), b.size());
    CHECK(std::abs(l.f1 - lo.f1) <= 1e-12);
    CHECK(std::abs(l.precision - lo.precision) <= 1e-12);
    CHECK(std::abs(l.recall - lo.recall) <= 1e-12);
    for (int n = 1; n <= 2; ++n) {
      auto got = rouge_n(ca, rb, n);
      auto cg = grams(a, n), rg = grams(b, n);
      auto want = oracle_prf(brute_overlap(cg, rg), cg.size(), rg.size());
      CHECK(std::abs(got.f1 - want.f1) <= 1e-12);
      CHECK(std::abs(got.precision - want.precision) <= 1e-12);
      CHECK(std::abs(got.recall - want.recall) <= 1e-12);
    }
  }
}

TEST_CASE("ROUGE worked examples") {
  auto c = seq({"the", "cat", "sat", "on", "the", "mat"});
  auto r = seq({"the", "cat", "is", "on", "the", "mat"});
  CHECK(rouge_n(c, r, 1).f1 == doctest::Approx(5.0 / 6.0));
  CHECK(rouge_n(c, r, 2).f1 == doctest::Approx(3.0 / 5.0));
  CHECK(rouge_l(c, r).f1 == doctest::Approx(5.0 / 6.0));
  // "the" appears twice in both: clipping allows two matches, not four.
  CHECK(rouge_n(seq({"the", "the", "the"}), seq({"the", "a"}), 1).precision == doctest::Approx(1.0 / 3.0));
  CHECK(rouge_l(seq({}), r).f1 == 0.0);
  CHECK_THROWS_AS(rouge_n(c, r, 5), ValidationError);
  CHECK_THROWS_AS(rouge_n(c, r, 0), ValidationError);
}

TEST_CASE("ROUGE-L F1 lands exactly on rational boundaries") {
  // LCS 7 of 10 vs 10: f1 = 14 / 20.
  auto a = seq({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  auto b = seq({"a", "b", "c", "d", "e", "f", "g", "x", "y", "z"});
  CHECK(rouge_l(a, b).f1 == 0.7);
  CHECK_FALSE(rouge_l(a, b).f1 < 0.7);
}

TEST_CASE("nearest_seed_similarity takes the max and the first index on ties") {
  std::vector<TokenSequence> pool = {seq({"x"}), seq({"a", "b"}), seq({"a", "b"})};
  auto m = nearest_seed_similarity(seq({"a", "b"}), pool);
  CHECK(m.score == 1.0);
  CHECK(m.index == 1);
  CHECK_THROWS_AS(nearest_seed_similarity(seq({"a"}), {}), ValidationError);
}

namespace {

double oracle_bleu(const std::vector<std::string>& c, const std::vector<std::vector<std::string>>& refs) {
  if (c.empty()) return 0.0;
  double log_p = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto cg = grams(c, n);
    std::map<std::vector<std::string>, std::size_t> cand_counts;
    for (const auto& g : cg) ++cand_counts[g];
    std::size_t matched = 0;
    for (const auto& [g, count] : cand_counts) {
      std::size_t best = 0;
      for (const auto& r : refs) {
        std::size_t in_ref = 0;
        for (const auto& rg : grams(r, n)) in_ref += rg == g;
        best = std::max(best, in_ref);
      }
      matched += std::min(count, best);
    }
    double p = matched == 0 ? 1.0 / static_cast<double>(cg.size() + 1)
                            : static_cast<double>(matched) / static_cast<double>(cg.size());
    log_p += std::log(p) / 4.0;
  }
  std::size_t best_len = refs[0].size();
  for (const auto& r : refs) {
    long d = std::labs(static_cast<long>(r.size()) - static_cast<long>(c.size()));
    long bd = std::labs(static_cast<long>(best_len) - static_cast<long>(c.size()));
    if (d < bd || (d == bd && r.size() < best_len)) best_len = r.size();
  }
  double bp = c.size() < best_len ? std::exp(1.0 - double(best_len) / double(c.size())) : 1.0;
  return bp * std::exp(log_p);
}

}  // namespace

TEST_CASE("BLEU-4 matches an independent recount") {
  auto c = seq({"the", "cat", "sat", "on", "the", "mat"});
  std::vector<TokenSequence> refs = {seq({"the", "cat", "sat", "on", "the", "mat"})};
  CHECK(bleu4(c, refs) == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_tokens(rng);
    std::vector<std::vector<std::string>> rs = {random_tokens(rng), random_tokens(rng)};
    if (rs[0].empty()) rs[0] = {"a"};
    std::vector<TokenSequence> refs2 = {TokenSequence{rs[0]}, TokenSequence{rs[1]}};
    CAPTURE(trial);
    CHECK(std::abs(bleu4(TokenSequence{a}, refs2) - oracle_bleu(a, rs)) <= 1e-12);
  }
}

TEST_CASE("BLEU-4 hand-computed smoothing and brevity penalty") {
  // 4 tokens against a 6-token reference: p1 = 4/4, p2 = 3/3, p3 = 2/2, p4 = 1/1.
  auto c = seq({"the", "cat", "sat", "on"});
  std::vector<TokenSequence> refs = {seq({"the", "cat", "sat", "on", "the", "mat"})};
  CHECK(bleu4(c, refs) == doctest::Approx(std::exp(1.0 - 6.0 / 4.0)));
  // No bigram match: p2 = 1/(2+1), p3 = 1/(1+1), p4 = 1/(0+1).
  auto d = seq({"mat", "cat", "the"});
  double expected = std::exp((std::log(1.0) + std::log(1.0 / 3.0) + std::log(0.5) + std::log(1.0)) / 4.0) *
                    std::exp(1.0 - 6.0 / 3.0);
  CHECK(bleu4(d, refs) == doctest::Approx(expected));
  CHECK(bleu4(seq({}), refs) == 0.0);
  CHECK_THROWS_AS(bleu4(c, {}), ValidationError);
}
