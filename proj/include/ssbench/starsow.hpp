#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssbench/config.hpp"
#include "ssbench/corpus.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/llm.hpp"
#include "ssbench/metrics.hpp"
#include "ssbench/prompt.hpp"
#include "ssbench/util.hpp"

namespace ssbench::starsow {

enum class TitleScope { global, per_chapter };

struct Targets {
  std::size_t n_chapters = 14;          // whole pool, seed chapters included
  std::size_t titles_per_chapter = 70;  // seed titles count toward it
  std::size_t stories_per_title = 1;
};

struct InContext {
  std::size_t chapter_examples_total = prompt::kChapterExamples;
  std::size_t chapter_examples_from_seed = 4;
  std::size_t title_examples = prompt::kTitleExamples;
  std::size_t story_examples = prompt::kStoryExamples;
};

struct PipelineConfig {
  Targets targets;
  llm::StagePresets presets = llm::stage_presets();
  std::uint64_t rng_seed = 0;
  double dedup_threshold = 0.7;
  InContext in_context;
  std::size_t stall_limit = 20;
  TitleScope title_scope = TitleScope::global;
  std::size_t max_story_words = 400;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> checkpoint_dir;

  static PipelineConfig from(const Config& config);
  void validate() const;  // throws ValidationError("InvalidConfig")
};

enum class StageId { taking_root = 1, branching_out = 2, bearing_star_fruits = 3, gardening_work = 4 };
std::string_view to_string(StageId s);

// One adjudicated candidate. Every candidate produced by the backend is
// logged exactly once.
struct LogEntry {
  std::string stage;  // "expand_chapters", "generate_titles", "generate_stories", ...
  std::string chapter_id;
  std::string candidate;
  bool accepted = false;
  std::string reason;  // empty when accepted
  double score = 0.0;  // nearest-neighbour f1 for dedup decisions
  std::string nearest;

  bool operator==(const LogEntry&) const = default;
};

struct GeneratedTitle {
  std::string chapter_id;
  std::string title;
  bool operator==(const GeneratedTitle&) const = default;
};

class GrowthPool {
 public:
  std::vector<corpus::ChapterNode> chapters;
  std::map<std::string, std::vector<std::string>> titles_by_chapter;
  std::vector<GeneratedTitle> generated_titles;  // acceptance order
  std::vector<corpus::StoryPair> stories;
  std::vector<LogEntry> log;
  int completed_stage = 0;

  std::size_t n_generated_chapters() const;
  const corpus::ChapterNode* find_chapter(std::string_view id) const;

  void add_chapter(corpus::ChapterNode node);
  void add_title(const std::string& chapter_id, const std::string& title, bool generated);

  // Dedup pools; tokenized lowercase words.
  const std::vector<metrics::TokenSequence>& chapter_tokens() const { return chapter_tokens_; }
  std::vector<metrics::TokenSequence> title_tokens(std::string_view chapter_id, TitleScope scope) const;
  std::vector<std::string> title_texts(std::string_view chapter_id, TitleScope scope) const;

  struct PooledTitle {
    std::string chapter_id;
    std::string text;
    bool generated = false;
    metrics::TokenSequence tokens;
  };
  // Every title, seed and generated, in the order it entered the pool.
  const std::vector<PooledTitle>& pooled_titles() const { return titles_; }

  bool operator==(const GrowthPool& o) const {
    return chapters == o.chapters && titles_by_chapter == o.titles_by_chapter &&
           generated_titles == o.generated_titles && stories == o.stories && log == o.log &&
           completed_stage == o.completed_stage;
  }

 private:
  std::vector<metrics::TokenSequence> chapter_tokens_;
  std::vector<PooledTitle> titles_;
};

inline constexpr int kCheckpointVersion = 1;

// JSONL: a header record, then chapter/title/story/log records.
std::string serialize_pool(const GrowthPool& pool, std::uint64_t rng_seed);
GrowthPool parse_pool(std::string_view text, std::optional<std::uint64_t> expected_seed = std::nullopt);

struct GardenDecision {
  bool accepted = true;
  std::vector<std::string> reasons;
  double score = 0.0;  // nearest-neighbour f1 (dedup checks)
  std::optional<std::size_t> nearest;
};

// Strict `<` against the threshold; an empty pool accepts with score 0.
GardenDecision garden_accept_chapter(const metrics::TokenSequence& candidate,
                                     const std::vector<metrics::TokenSequence>& pool, double threshold = 0.7);
GardenDecision garden_accept_title(const metrics::TokenSequence& candidate,
                                   const std::vector<metrics::TokenSequence>& pool, double threshold = 0.7);

// Reasons, in this order: second-person, vocabulary, tone, length,
// missing-part.
GardenDecision garden_accept_story(const corpus::StoryContent& content, std::size_t max_words = 400,
                                   const lint::LintConfig& config = lint::LintConfig::builtin());

// Numbered-line parsers for completions; `cue` is the ordinal the prompt ended
// with and is prepended before parsing. Every non-blank line comes back, in
// order, flagged ok or not.
struct ParsedLine {
  std::string raw;
  bool ok = false;
  std::string name;  // chapter name or title
  std::string explanation;
};
std::vector<ParsedLine> parse_chapter_lines(std::string_view completion, std::string_view cue = "9. ");
std::vector<ParsedLine> parse_title_lines(std::string_view completion, std::string_view cue = "1. ");

// Labeled story text rebuilt from a complete_story continuation.
std::string story_raw_text(std::string_view title, std::string_view completion);

// --- stages ----------------------------------------------------------------

// Explanations for seed chapters that lack one; chapters that already have
// one are returned unchanged without a backend call.
std::vector<corpus::ChapterNode> taking_root_explain(const corpus::Corpus& seed, llm::Backend& backend,
                                                     const PipelineConfig& config);

std::vector<corpus::ChapterNode> taking_root_expand(GrowthPool& pool, const PipelineConfig& config,
                                                    llm::Backend& backend, Rng& rng);

std::vector<std::string> branching_out(const corpus::ChapterNode& node, const corpus::Corpus& seed, GrowthPool& pool,
                                       const PipelineConfig& config, llm::Backend& backend, Rng& rng);

// One complete_story call with examples drawn from `examples`; returns the
// labeled raw text, unfiltered. Example chapters are resolved via
// `chapter_of` and must carry explanations.
std::string draft_story(const corpus::ChapterNode& node, const std::string& title,
                        const std::vector<corpus::StoryPair>& examples,
                        const std::function<const corpus::ChapterNode*(std::string_view)>& chapter_of,
                        const PipelineConfig& config, llm::Backend& backend, Rng& rng);

struct StoryOutcome {
  std::optional<corpus::StoryPair> pair;
  std::vector<std::string> reasons;  // "parse-failure" or garden reasons
  std::string raw;
};

StoryOutcome bearing_star_fruits(const corpus::ChapterNode& node, const std::string& title,
                                 const corpus::Corpus& seed, const GrowthPool& pool, const PipelineConfig& config,
                                 llm::Backend& backend, Rng& rng);

struct AuditReport {
  std::size_t chapters_checked = 0;
  std::size_t titles_checked = 0;
  std::size_t stories_checked = 0;
  std::vector<std::string> violations;
};

// Replays the acceptance log against the dedup rule and re-checks every
// accepted story. Pure; does not modify the pool.
AuditReport audit_pool(const GrowthPool& pool, const PipelineConfig& config);

struct PipelineResult {
  corpus::Corpus corpus;
  GrowthPool pool;
  AuditReport audit;
  std::size_t backend_calls = 0;
};

// Runs the four stages, checkpointing after each into
// config.checkpoint_dir (when set) and resuming from the newest checkpoint
// found there.
PipelineResult run_pipeline(const corpus::Corpus& seed, const PipelineConfig& config, llm::Backend& backend);

std::string checkpoint_name(StageId stage);

// Run manifest: config, seed, template and lexicon versions, counts.
std::string manifest_json(const PipelineConfig& config, const PipelineResult& result, const Config& raw_config,
                          std::string_view backend_name);

}  // namespace ssbench::starsow
