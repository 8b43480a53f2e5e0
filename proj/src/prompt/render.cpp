#include <algorithm>

#include "ssbench/error.hpp"
#include "ssbench/prompt.hpp"
#include "ssbench/util.hpp"

namespace ssbench::prompt {

namespace {

constexpr std::pair<PromptKind, std::string_view> kNames[] = {
    {PromptKind::base_context, "base_context"},     {PromptKind::explain_chapter, "explain_chapter"},
    {PromptKind::expand_chapter, "expand_chapter"}, {PromptKind::expand_title, "expand_title"},
    {PromptKind::complete_story, "complete_story"}, {PromptKind::title_to_story, "title_to_story"},
    {PromptKind::gpt_eval_CH, "gpt_eval_CH"},       {PromptKind::gpt_eval_DC, "gpt_eval_DC"},
    {PromptKind::gpt_eval_EM, "gpt_eval_EM"},       {PromptKind::gpt_eval_GA, "gpt_eval_GA"},
    {PromptKind::gpt_eval_RE, "gpt_eval_RE"},
};

constexpr std::string_view kAssetNames[] = {
    "base_context",   "explain_chapter", "expand_chapter", "chapter_example", "title_example", "expand_title",
    "story_example",  "story_criteria",  "complete_story", "title_to_story",  "gpt_eval_CH",   "gpt_eval_DC",
    "gpt_eval_EM",    "gpt_eval_GA",     "gpt_eval_RE"};

[[noreturn]] void missing(PromptKind kind, std::string_view field) {
  throw ValidationError("MissingField",
                        "MissingField(" + std::string(to_string(kind)) + ", " + std::string(field) + ")");
}

void require_count(PromptKind kind, std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw ValidationError("WrongExampleCount", "WrongExampleCount(" + std::string(to_string(kind)) + ", expected " +
                                                   std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

const corpus::ChapterNode& require_chapter(PromptKind kind, const std::optional<corpus::ChapterNode>& c,
                                           bool need_explanation) {
  if (!c || trim(c->name).empty()) missing(kind, "chapter");
  if (need_explanation && trim(c->explanation).empty()) missing(kind, "chapter.explanation");
  return *c;
}

// Python-list style rendering used by the chapter-explanation prompt.
std::string title_list(const std::vector<std::string>& titles) {
  std::string out = "[";
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (i > 0) out += ", ";
    out += "'" + titles[i] + "'";
  }
  return out + "]";
}

std::string story_content(const corpus::StoryPair& pair) { return pair.content.joined(); }

}  // namespace

std::string_view to_string(PromptKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

PromptKind kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ValidationError("UnknownPromptKind", "unknown prompt kind '" + std::string(name) + "'");
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  for (auto name : kAssetNames) {
    std::string text = read_file(dir / (std::string(name) + ".txt"));
    if (!text.empty() && text.back() == '\n') text.pop_back();
    set.assets_.emplace_back(std::string(name), std::move(text));
  }
  set.version_ = trim(read_file(dir / "VERSION"));
  return set;
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = load(data_dir() / "templates");
  return set;
}

const std::string& TemplateSet::get(std::string_view name) const {
  for (const auto& [n, text] : assets_) {
    if (n == name) return text;
  }
  throw ValidationError("UnknownTemplate", "no template asset '" + std::string(name) + "'");
}

std::string substitute(std::string_view tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    std::size_t open = tmpl.find("{{", i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw ValidationError("TemplateError", "unterminated placeholder");
    out.append(tmpl.substr(i, open - i));
    std::string_view name = tmpl.substr(open + 2, close - open - 2);
    auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == name; });
    if (it == values.end()) throw ValidationError("TemplateError", "no value for placeholder {{" + std::string(name) + "}}");
    out.append(it->second);
    i = close + 2;
  }
  return out;
}

std::string render_example_block(PromptKind kind, const ExampleBlock& item, std::size_t ordinal,
                                 const TemplateSet& templates) {
  switch (kind) {
    case PromptKind::expand_chapter:
      if (trim(item.chapter.name).empty()) missing(kind, "example.chapter");
      if (trim(item.chapter.explanation).empty()) missing(kind, "example.explanation");
      return substitute(templates.get("chapter_example"), {{"ordinal", std::to_string(ordinal)},
                                                           {"chapter", item.chapter.name},
                                                           {"explanation", item.chapter.explanation}});
    case PromptKind::expand_title: {
      if (trim(item.chapter.name).empty()) missing(kind, "example.chapter");
      if (trim(item.chapter.explanation).empty()) missing(kind, "example.explanation");
      if (item.titles.empty()) missing(kind, "example.titles");
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < item.titles.size(); ++i) lines.push_back(std::to_string(i + 1) + ". " + item.titles[i]);
      return substitute(templates.get("title_example"), {{"chapter", item.chapter.name},
                                                         {"explanation", item.chapter.explanation},
                                                         {"numbered_titles", join(lines, "\n")}});
    }
    case PromptKind::complete_story: {
      if (trim(item.chapter.name).empty()) missing(kind, "example.chapter");
      if (trim(item.chapter.explanation).empty()) missing(kind, "example.explanation");
      if (!item.story) missing(kind, "example.story");
      const auto& s = *item.story;
      return substitute(templates.get("story_example"), {{"chapter", item.chapter.name},
                                                         {"explanation", item.chapter.explanation},
                                                         {"title", s.title},
                                                         {"introduction", s.content.introduction},
                                                         {"main_body", s.content.main_body},
                                                         {"conclusion", s.content.conclusion}});
    }
    default:
      throw ValidationError("NoExampleBlock", std::string(to_string(kind)) + " has no example block shape");
  }
}

std::string render(PromptKind kind, const PromptContext& ctx, const TemplateSet& templates) {
  const std::string& base = templates.get("base_context");
  const std::string& tmpl = templates.get(to_string(kind));
  switch (kind) {
    case PromptKind::base_context:
      return base;

    case PromptKind::explain_chapter: {
      const auto& chapter = require_chapter(kind, ctx.chapter, false);
      if (!ctx.titles || ctx.titles->empty()) missing(kind, "titles");
      return substitute(tmpl, {{"base_context", base}, {"chapter", chapter.name}, {"title_list", title_list(*ctx.titles)}});
    }

    case PromptKind::expand_chapter: {
      if (!ctx.examples) missing(kind, "examples");
      require_count(kind, kChapterExamples, ctx.examples->size());
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < ctx.examples->size(); ++i) {
        lines.push_back(render_example_block(kind, (*ctx.examples)[i], i + 1, templates));
      }
      return substitute(tmpl, {{"base_context", base},
                               {"chapter_examples", join(lines, "\n")},
                               {"next_ordinal", std::to_string(lines.size() + 1)}});
    }

    case PromptKind::expand_title: {
      if (!ctx.examples) missing(kind, "examples");
      require_count(kind, kTitleExamples, ctx.examples->size());
      const auto& chapter = require_chapter(kind, ctx.chapter, true);
      std::vector<std::string> blocks;
      for (const auto& ex : *ctx.examples) blocks.push_back(render_example_block(kind, ex, 1, templates));
      return substitute(tmpl, {{"base_context", base},
                               {"title_examples", join(blocks, "\n")},
                               {"chapter", chapter.name},
                               {"explanation", chapter.explanation}});
    }

    case PromptKind::complete_story: {
      if (!ctx.examples) missing(kind, "examples");
      require_count(kind, kStoryExamples, ctx.examples->size());
      const auto& chapter = require_chapter(kind, ctx.chapter, true);
      if (!ctx.pair || trim(ctx.pair->title).empty()) missing(kind, "pair.title");
      std::vector<std::string> blocks;
      for (const auto& ex : *ctx.examples) blocks.push_back(render_example_block(kind, ex, 1, templates));
      return substitute(tmpl, {{"criteria", templates.get("story_criteria")},
                               {"story_examples", join(blocks, "\n\n")},
                               {"chapter", chapter.name},
                               {"explanation", chapter.explanation},
                               {"title", ctx.pair->title}});
    }

    case PromptKind::title_to_story:
      if (!ctx.pair || trim(ctx.pair->title).empty()) missing(kind, "pair.title");
      return substitute(tmpl, {{"title", ctx.pair->title}});

    case PromptKind::gpt_eval_CH:
    case PromptKind::gpt_eval_DC:
    case PromptKind::gpt_eval_EM:
    case PromptKind::gpt_eval_GA:
    case PromptKind::gpt_eval_RE:
      if (!ctx.pair || trim(ctx.pair->title).empty()) missing(kind, "pair.title");
      return substitute(tmpl, {{"title", ctx.pair->title}, {"story_content", story_content(*ctx.pair)}});
  }
  throw ValidationError("UnknownPromptKind", "unhandled prompt kind");
}

}  // namespace ssbench::prompt
