#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssbench/corpus.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/llm.hpp"
#include "ssbench/metrics.hpp"
#include "ssbench/starsow.hpp"

namespace ssbench::eval {

// ---------------------------------------------------------------------------
// Traditional metrics

struct Prediction {
  std::string id;  // id of the reference pair
  std::string text;
};

// JSONL of {"id": ..., "text": ...}.
std::vector<Prediction> parse_predictions(std::string_view jsonl);

struct MetricRow {
  std::string model;
  std::size_t n = 0;
  double bleu4 = 0.0;  // means x100
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;
};

struct MetricTable {
  std::vector<MetricRow> rows;
};

// Reference text is StoryContent::joined(). Throws ValidationError
// ("UnmatchedId") for a prediction without a reference pair.
MetricRow eval_traditional(std::string model, const std::vector<Prediction>& predictions,
                           const corpus::Corpus& references,
                           metrics::TokenMode mode = metrics::TokenMode::lowercase_words, std::size_t jobs = 1);

std::string serialize_metric_table(const MetricTable& table);
std::string format_metric_table(const MetricTable& table);

// ---------------------------------------------------------------------------
// Judge

enum class Dimension { CH, DC, EM, GA, RE };
inline constexpr std::array<Dimension, 5> kAllDimensions = {Dimension::CH, Dimension::DC, Dimension::EM,
                                                            Dimension::GA, Dimension::RE};
std::string_view to_string(Dimension d);
Dimension dimension_from_string(std::string_view s);  // throws ValidationError("InvalidDimension")
std::vector<Dimension> parse_dimensions(std::string_view csv);

struct JudgeScore {
  Dimension dimension = Dimension::CH;
  int score = 0;
  std::string feedback;  // at most 100 words
  std::string evidence;  // the score line as received
};

std::string judge_request(const corpus::StoryPair& pair, Dimension dimension);

// The first non-empty line, with markdown emphasis removed, must read
//   [label] [ (1-5) ] [:|-|=] <1-5> [/5 | out of 5] [separator ...]
// where label is score, rating, overall (score), final score, or a dimension
// name. Anything else, including decimals and ranges, throws
// ValidationError("UnparseableScore").
JudgeScore parse_judge_response(std::string_view raw, Dimension dimension);

struct JudgeRecord {
  std::string pair_id;
  Dimension dimension = Dimension::CH;
  std::string request;
  std::string response;
  std::optional<JudgeScore> score;
  std::string error;
};

std::vector<JudgeRecord> judge_pairs(const std::vector<corpus::StoryPair>& pairs,
                                     const std::vector<Dimension>& dimensions, llm::Backend& backend,
                                     std::size_t jobs = 1);

std::string serialize_transcripts(const std::vector<JudgeRecord>& records);

struct JudgeSummaryRow {
  Dimension dimension = Dimension::CH;
  std::size_t scored = 0;
  std::size_t errors = 0;
  double mean = 0.0;
};
std::vector<JudgeSummaryRow> summarize_judgements(const std::vector<JudgeRecord>& records);
std::string serialize_judge_summary(const std::vector<JudgeSummaryRow>& rows);
std::string format_judge_summary(const std::vector<JudgeSummaryRow>& rows);

// ---------------------------------------------------------------------------
// Diversity

inline constexpr std::size_t kSimilarityBins = 20;  // width 0.05 over [0, 1]
std::size_t similarity_bin(double score);

// Title lengths: one bin per word count 0..19, then 20+.
// Content lengths: 25-word bins 0-24 ... 475-499, then 500+.
inline constexpr std::size_t kTitleLengthBins = 21;
inline constexpr std::size_t kContentLengthBins = 21;
inline constexpr std::size_t kContentLengthBinWidth = 25;

struct VerbNoun {
  std::string verb;
  std::string noun;
  bool operator==(const VerbNoun&) const = default;
  auto operator<=>(const VerbNoun&) const = default;
};

struct DiversityReport {
  std::array<std::size_t, kSimilarityBins> title_similarity{};
  std::array<std::size_t, kSimilarityBins> content_similarity{};
  std::array<std::size_t, kTitleLengthBins> title_lengths{};
  std::array<std::size_t, kContentLengthBins> content_lengths{};
  std::vector<double> title_scores;  // per generated pair, corpus order
  std::vector<double> content_scores;
  std::vector<std::pair<VerbNoun, std::size_t>> verb_noun_counts;  // count desc, then pair asc
  std::size_t titles_without_verb = 0;
  std::size_t n_items = 0;
};

// Generated pairs are those with origin=generated in `generated`; if there
// are none, every pair counts.
DiversityReport diversity_report(const corpus::Corpus& generated, const corpus::Corpus& seed, std::size_t jobs = 1);
std::string serialize_diversity(const DiversityReport& report, std::size_t top_k = 20);
std::string format_diversity(const DiversityReport& report, std::size_t top_k = 20);

// Root verb / object heuristic (stands in for a constituency parser).
struct VerbNounLexicon {
  lint::Lexicon verbs;
  lint::Lexicon nouns;
  std::vector<std::string> stopwords;
  static const VerbNounLexicon& builtin();
};

// Suffix-rule lemma of `token` that appears in the verb lexicon, if any.
std::optional<std::string> verb_lemma(std::string_view token, const VerbNounLexicon& lex = VerbNounLexicon::builtin());
std::optional<VerbNoun> extract_verb_noun(std::string_view title,
                                          const VerbNounLexicon& lex = VerbNounLexicon::builtin());

// ---------------------------------------------------------------------------
// Regenerate and rate

struct RegenItem {
  std::string source_id;
  std::string chapter_id;
  std::string title;
  std::string raw;
  std::optional<lint::QualityReport> report;
  std::string error;
};

struct RegenResult {
  std::vector<RegenItem> items;
  lint::LintSummary summary;  // over items that produced a report
};

// `size` pairs sampled uniformly without replacement (all if size >= n).
std::vector<corpus::StoryPair> sample_pairs(const corpus::Corpus& corpus, std::size_t size, std::uint64_t seed);

// Regenerates each sampled pair's story from its chapter and title with the
// story prompt (examples drawn from `corpus`), no garden filter, then lints.
RegenResult regenerate_and_rate(const std::vector<corpus::StoryPair>& sample, const corpus::Corpus& corpus,
                                llm::Backend& backend, const starsow::PipelineConfig& config,
                                const lint::LintConfig& lint_config = lint::LintConfig::builtin());

std::string serialize_regen(const RegenResult& result);

}  // namespace ssbench::eval
