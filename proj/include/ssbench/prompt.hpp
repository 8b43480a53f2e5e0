#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssbench/corpus.hpp"

namespace ssbench::prompt {

enum class PromptKind {
  base_context,
  explain_chapter,
  expand_chapter,
  expand_title,
  complete_story,
  title_to_story,
  gpt_eval_CH,
  gpt_eval_DC,
  gpt_eval_EM,
  gpt_eval_GA,
  gpt_eval_RE,
};

inline constexpr PromptKind kAllKinds[] = {
    PromptKind::base_context,   PromptKind::explain_chapter, PromptKind::expand_chapter, PromptKind::expand_title,
    PromptKind::complete_story, PromptKind::title_to_story,  PromptKind::gpt_eval_CH,    PromptKind::gpt_eval_DC,
    PromptKind::gpt_eval_EM,    PromptKind::gpt_eval_GA,     PromptKind::gpt_eval_RE};

std::string_view to_string(PromptKind kind);
PromptKind kind_from_string(std::string_view name);

// One in-context example. expand_chapter reads `chapter`; expand_title reads
// `chapter` + `titles`; complete_story reads `chapter` + `story`.
struct ExampleBlock {
  corpus::ChapterNode chapter;
  std::vector<std::string> titles;
  std::optional<corpus::StoryPair> story;
};

struct PromptContext {
  std::optional<corpus::ChapterNode> chapter;
  std::optional<std::vector<std::string>> titles;
  std::optional<std::vector<ExampleBlock>> examples;
  std::optional<corpus::StoryPair> pair;
};

// Exact in-context example counts.
inline constexpr std::size_t kChapterExamples = 8;
inline constexpr std::size_t kTitleExamples = 8;
inline constexpr std::size_t kStoryExamples = 4;
// Titles listed per title-generation example block, at most.
inline constexpr std::size_t kTitlesPerExample = 15;

// Template assets under <dir>/<name>.txt; the trailing LF of each file is
// not part of the template.
class TemplateSet {
 public:
  static TemplateSet load(const std::filesystem::path& dir);
  static const TemplateSet& builtin();  // data_dir()/templates

  const std::string& get(std::string_view name) const;
  const std::string& version() const { return version_; }

 private:
  std::vector<std::pair<std::string, std::string>> assets_;
  std::string version_;
};

// Throws ValidationError("MissingField" | "WrongExampleCount").
std::string render(PromptKind kind, const PromptContext& ctx, const TemplateSet& templates = TemplateSet::builtin());

// `ordinal` numbers chapter-example lines ("3. *chapter*: explanation").
std::string render_example_block(PromptKind kind, const ExampleBlock& item, std::size_t ordinal = 1,
                                 const TemplateSet& templates = TemplateSet::builtin());

// Single-pass `{{name}}` substitution. Inserted values are never rescanned.
std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace ssbench::prompt
