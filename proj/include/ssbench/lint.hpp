#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ssbench/corpus.hpp"
#include "ssbench/metrics.hpp"

namespace ssbench::lint {

// ---------------------------------------------------------------------------
// Lexicons

// One lowercase phrase per line, `#` comments, and a mandatory
// `# version: N` header. `*` inside a phrase matches exactly one token.
struct Lexicon {
  std::string name;
  int version = 0;
  std::vector<std::vector<std::string>> phrases;

  static Lexicon parse(std::string_view text, std::string name);
  static Lexicon load(const std::filesystem::path& path);
};

struct PhraseMatch {
  std::size_t phrase = 0;     // index into Lexicon::phrases
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive
};

// All matches, leftmost first; at one start position the longest phrase wins.
std::vector<PhraseMatch> find_phrases(const std::vector<metrics::TokenSpan>& tokens, const Lexicon& lexicon);

std::string phrase_text(const Lexicon& lexicon, std::size_t phrase);

struct LintConfig {
  Lexicon coaching;
  Lexicon negative_behavior;
  Lexicon tone;
  Lexicon tone_frames;
  Lexicon idioms;
  Lexicon vocabulary;
  std::unordered_set<std::string> stopwords;
  int lexicon_version = 1;
  bool exempt_quoted_speech = false;

  // Loads every lexicon from `dir`, failing if any declares a version other
  // than `expected_version`.
  static LintConfig load(const std::filesystem::path& dir, int expected_version = 1);
  // Lexicons under data_dir()/lexicons, loaded once.
  static const LintConfig& builtin();
};

// ---------------------------------------------------------------------------
// Story structure

enum class Part { title, introduction, main_body, conclusion };
std::string_view to_string(Part p);

enum class SentenceKind { descriptive, coaching };
std::string_view to_string(SentenceKind k);

struct Sentence {
  std::string text;
  std::size_t index = 0;  // ordinal within its part
  Part part = Part::introduction;
  SentenceKind kind = SentenceKind::descriptive;
  std::string coaching_rule;  // matched rule-table entry when coaching
};

struct StoryStructure {
  std::string title;
  corpus::StoryContent parts;
  std::vector<Sentence> sentences;
  std::string raw;
};

// Lenient view of labeled story text: what was found where. parse_story and
// the structural-clarity scorer are both built on it.
struct PartScan {
  bool present = false;
  std::size_t position = 0;  // byte offset of the label
  std::string text;
};

struct StoryScan {
  std::array<PartScan, 4> parts;  // indexed by Part
  std::size_t misordered = 0;     // labels outside the longest in-order run

  const PartScan& at(Part p) const { return parts[static_cast<std::size_t>(p)]; }
};

StoryScan scan_story(std::string_view raw);

// Labeled format `1. # Title #:` ... `4. # Conclusion #:`; numeric prefixes
// optional, `#` padding tolerated, case-insensitive. Throws
// ValidationError("MissingPart"|"OrderViolation").
StoryStructure parse_story(std::string_view raw, const LintConfig& config = LintConfig::builtin());
StoryStructure structure_from_pair(const corpus::StoryPair& pair, const LintConfig& config = LintConfig::builtin());

// The labeled text form of a pair, as used in in-context examples.
std::string labeled_text(std::string_view title, const corpus::StoryContent& content);

// Splits on . ! ? followed by whitespace or end of text; Mr. Mrs. Dr. e.g.
// i.e. do not end a sentence.
std::vector<std::string> segment_sentences(std::string_view part_text);

struct Classification {
  SentenceKind kind = SentenceKind::descriptive;
  std::string rule;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
};

Classification classify_sentence(std::string_view sentence, const LintConfig& config = LintConfig::builtin());

// ---------------------------------------------------------------------------
// Checks

enum class CheckId { SC_Q1, SC_Q2, SC_Q3, SC_Q4, DO_Q1, SS_Q1A, SS_Q1B, SS_Q2, SS_Q3, SS_Q4 };
inline constexpr std::array<CheckId, 10> kAllChecks = {CheckId::SC_Q1, CheckId::SC_Q2, CheckId::SC_Q3, CheckId::SC_Q4,
                                                       CheckId::DO_Q1, CheckId::SS_Q1A, CheckId::SS_Q1B, CheckId::SS_Q2,
                                                       CheckId::SS_Q3, CheckId::SS_Q4};
std::string_view to_string(CheckId id);
bool is_scored(CheckId id);  // SC checks carry a 1-5 score, the rest pass/fail

struct Evidence {
  Part part = Part::introduction;
  long sentence_index = -1;  // -1 when the evidence is not tied to a sentence
  std::string span;
  std::string rule;

  bool operator==(const Evidence&) const = default;
};

struct CheckResult {
  CheckId id = CheckId::SC_Q1;
  int score = 0;       // SC checks only
  bool passed = true;  // DO/SS checks only
  std::vector<Evidence> evidence;
};

struct DescriptiveCounts {
  std::size_t descriptive = 0;
  std::size_t coaching = 0;
  double ratio = 0.0;  // +inf when coaching == 0 and descriptive > 0
};

DescriptiveCounts count_sentence_kinds(const StoryStructure& st);

CheckResult check_descriptive_orientation(const StoryStructure& st);
std::pair<CheckResult, CheckResult> check_perspective(const StoryStructure& st,
                                                      const LintConfig& config = LintConfig::builtin());
CheckResult check_tone(const StoryStructure& st, const LintConfig& config = LintConfig::builtin());
CheckResult check_accuracy(const StoryStructure& st, const LintConfig& config = LintConfig::builtin());
CheckResult check_vocabulary(const StoryStructure& st, const LintConfig& config = LintConfig::builtin());

// Content-word Jaccard between two texts (lowercase, stopwords removed).
double content_jaccard(std::string_view a, std::string_view b, const LintConfig& config = LintConfig::builtin());
int jaccard_band(double j);

std::array<CheckResult, 4> score_structure(const StoryScan& scan, const LintConfig& config = LintConfig::builtin());
std::array<CheckResult, 4> score_structure(const StoryStructure& st, const LintConfig& config = LintConfig::builtin());

// ---------------------------------------------------------------------------
// Reports

struct QualityReport {
  std::string story_id;
  bool structure_ok = false;
  std::string parse_error;
  std::vector<CheckResult> results;  // one per CheckId, in kAllChecks order
  double sc_average = 0.0;
  bool do_qualified = false;
  bool ss_qualified = false;
  std::size_t word_count = 0;
  std::size_t n_descriptive = 0;
  std::size_t n_coaching = 0;
  double ratio_descriptive_coaching = 0.0;

  const CheckResult& result(CheckId id) const { return results[static_cast<std::size_t>(id)]; }
};

QualityReport lint_story(const corpus::StoryPair& pair, const LintConfig& config = LintConfig::builtin());
// Lints labeled raw text; parse failures are recorded, not thrown.
QualityReport lint_text(std::string_view story_id, std::string_view raw,
                        const LintConfig& config = LintConfig::builtin());

// Stable key order; byte-identical for identical inputs.
std::string serialize_report(const QualityReport& report);

// Rubric roll-up over many reports.
struct LintSummary {
  std::size_t n = 0;
  double sc_pct = 0.0;  // mean(sc_average) / 5 * 100
  double do_pct = 0.0;
  double ss_pct = 0.0;
  std::array<double, 10> check_pct{};  // SC: mean score / 5 * 100; others: pass rate
};

LintSummary summarize(const std::vector<QualityReport>& reports);
std::string serialize_summary(const LintSummary& summary);
std::string format_summary_table(const LintSummary& summary);

// Check ids with their checklist question text, shared with the annotation UI.
std::string rubric_json();

}  // namespace ssbench::lint
