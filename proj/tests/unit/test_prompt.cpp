#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssbench/corpus.hpp"
#include "ssbench/error.hpp"
#include "ssbench/prompt.hpp"
#include "test_paths.hpp"

using namespace ssbench;
using namespace ssbench::prompt;

namespace {

const corpus::Corpus& seed() {
  static const corpus::Corpus c = corpus::load_corpus(testing::fixture("compliant.jsonl"));
  return c;
}

std::vector<ExampleBlock> examples(std::size_t n, bool with_titles, bool with_story) {
  std::vector<ExampleBlock> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ch = seed().chapters()[i];
    ExampleBlock b{ch, {}, std::nullopt};
    auto pairs = seed().pairs_in_chapter(ch.id);
    if (with_titles) {
      for (std::size_t k = 0; k < pairs.size() && k < 3; ++k) b.titles.push_back(pairs[k]->title);
    }
    if (with_story) b.story = *pairs.front();
    out.push_back(std::move(b));
  }
  return out;
}

PromptContext context_for(PromptKind kind) {
  PromptContext ctx;
  const auto& target = seed().chapters()[9];
  const auto& pair = seed().pairs().front();
  switch (kind) {
    case PromptKind::base_context: break;
    case PromptKind::explain_chapter:
      ctx.chapter = corpus::ChapterNode{target.id, target.name, "", target.origin};
      ctx.titles = std::vector<std::string>{"Brushing My Teeth", "Washing My Hands"};
      break;
    case PromptKind::expand_chapter: ctx.examples = examples(kChapterExamples, false, false); break;
    case PromptKind::expand_title:
      ctx.examples = examples(kTitleExamples, true, false);
      ctx.chapter = target;
      break;
    case PromptKind::complete_story:
      ctx.examples = examples(kStoryExamples, false, true);
      ctx.chapter = target;
      ctx.pair = corpus::StoryPair{"x", target.id, "Waiting for the Bus", {}, corpus::Origin::generated};
      break;
    default: ctx.pair = pair; break;
  }
  return ctx;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

}  // namespace

TEST_CASE("rendered prompts match their goldens") {
  const auto golden_dir = testing::templates_dir() / "golden";
  const bool update = std::getenv("SSBENCH_UPDATE_GOLDENS") != nullptr;
  auto templates = TemplateSet::load(testing::templates_dir());
  for (auto kind : kAllKinds) {
    CAPTURE(std::string(to_string(kind)));
    std::string text = render(kind, context_for(kind), templates);
    auto path = golden_dir / (std::string(to_string(kind)) + ".txt");
    if (update) {
      std::filesystem::create_directories(golden_dir);
      std::ofstream(path, std::ios::binary) << text;
    }
    REQUIRE(std::filesystem::exists(path));
    CHECK(read_text(path) == text);
  }
}

TEST_CASE("builtin templates carry a version") {
  CHECK_FALSE(TemplateSet::builtin().version().empty());
  CHECK(kind_from_string("gpt_eval_RE") == PromptKind::gpt_eval_RE);
  CHECK_THROWS_AS(kind_from_string("nope"), ValidationError);
}

TEST_CASE("chapter prompt lists eight numbered examples and cues the ninth") {
  auto text = render(PromptKind::expand_chapter, context_for(PromptKind::expand_chapter));
  for (int i = 1; i <= 8; ++i) CHECK(text.find("\n" + std::to_string(i) + ". ") != std::string::npos);
  CHECK(text.size() >= 3);
  CHECK(text.substr(text.size() - 3) == "9. ");
  CHECK(text.rfind(TemplateSet::builtin().get("base_context"), 0) == 0);
}

TEST_CASE("title prompt ends on the first-title cue") {
  auto text = render(PromptKind::expand_title, context_for(PromptKind::expand_title));
  CHECK(text.substr(text.size() - 3) == "1. ");
  CHECK(count(text, "Social Story Titles in the Chapter:") == kTitleExamples + 1);
  CHECK(text.find(seed().chapters()[9].explanation) != std::string::npos);
}

TEST_CASE("story prompt embeds four examples and the length cap") {
  auto text = render(PromptKind::complete_story, context_for(PromptKind::complete_story));
  CHECK(text.find("must not exceed 400 words") != std::string::npos);
  CHECK(text.find("Waiting for the Bus") != std::string::npos);
  for (std::size_t i = 0; i < kStoryExamples; ++i) {
    CHECK(text.find(seed().pairs_in_chapter(seed().chapters()[i].id).front()->content.main_body) != std::string::npos);
  }
  auto direct = render(PromptKind::title_to_story, context_for(PromptKind::title_to_story));
  CHECK(direct.find("200-300 words") != std::string::npos);
  CHECK(direct.find(seed().pairs().front().title) != std::string::npos);
}

TEST_CASE("explain prompt renders titles as a quoted list") {
  auto text = render(PromptKind::explain_chapter, context_for(PromptKind::explain_chapter));
  CHECK(text.find("['Brushing My Teeth', 'Washing My Hands']") != std::string::npos);
}

TEST_CASE("judge prompts embed title and joined content") {
  const auto& p = seed().pairs().front();
  for (auto kind : {PromptKind::gpt_eval_CH, PromptKind::gpt_eval_DC, PromptKind::gpt_eval_EM,
                    PromptKind::gpt_eval_GA, PromptKind::gpt_eval_RE}) {
    auto text = render(kind, context_for(kind));
    CHECK(text.find(p.title) != std::string::npos);
    CHECK(text.find(p.content.joined()) != std::string::npos);
  }
}

TEST_CASE("wrong example counts and missing fields are rejected") {
  for (std::size_t n : {0u, 7u, 9u}) {
    auto ctx = context_for(PromptKind::expand_chapter);
    ctx.examples = examples(n, false, false);
    try {
      render(PromptKind::expand_chapter, ctx);
      FAIL("expected WrongExampleCount");
    } catch (const ValidationError& e) {
      CHECK(e.code() == "WrongExampleCount");
    }
  }
  auto ctx = context_for(PromptKind::complete_story);
  ctx.examples = examples(3, false, true);
  CHECK_THROWS_AS(render(PromptKind::complete_story, ctx), ValidationError);

  auto no_title = context_for(PromptKind::gpt_eval_CH);
  no_title.pair->title = "  ";
  try {
    render(PromptKind::gpt_eval_CH, no_title);
    FAIL("expected MissingField");
  } catch (const ValidationError& e) {
    CHECK(e.code() == "MissingField");
  }
  auto unexplained = context_for(PromptKind::expand_title);
  unexplained.chapter->explanation = "";
  CHECK_THROWS_AS(render(PromptKind::expand_title, unexplained), ValidationError);
  auto bad_example = context_for(PromptKind::expand_chapter);
  (*bad_example.examples)[3].chapter.explanation = "";
  CHECK_THROWS_AS(render(PromptKind::expand_chapter, bad_example), ValidationError);
}

TEST_CASE("substitution is single pass") {
  CHECK(substitute("{{a}}-{{b}}", {{"a", "{{b}}"}, {"b", "x"}}) == "{{b}}-x");
  CHECK_THROWS_AS(substitute("{{missing}}", {}), ValidationError);
  CHECK_THROWS_AS(substitute("{{open", {}), ValidationError);
}
