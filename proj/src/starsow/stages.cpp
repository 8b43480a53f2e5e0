#include <cstdio>

#include "ssbench/parallel.hpp"
#include "ssbench/error.hpp"
#include "ssbench/starsow.hpp"
#include "ssbench/util.hpp"

namespace ssbench::starsow {

namespace {

// k draws from [0, n): without replacement when possible, otherwise with.
std::vector<std::size_t> draw(Rng& rng, std::size_t n, std::size_t k) {
  if (n >= k) return sample_indices(rng, n, k);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(uniform_below(rng, n));
  return out;
}

std::string format_id(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

[[noreturn]] void stall(std::string_view what, std::size_t rounds) {
  throw IoError("StallLimit", std::string(what) + ": no candidate accepted in " + std::to_string(rounds) +
                                  " consecutive rounds");
}

LogEntry dedup_entry(std::string stage, std::string chapter_id, std::string candidate, const GardenDecision& d,
                     const std::vector<std::string>& pool_texts) {
  LogEntry e{std::move(stage), std::move(chapter_id), std::move(candidate), d.accepted, "", d.score, ""};
  if (!d.accepted) e.reason = join(d.reasons, ",");
  if (d.nearest && *d.nearest < pool_texts.size()) e.nearest = pool_texts[*d.nearest];
  return e;
}

}  // namespace

std::vector<corpus::ChapterNode> taking_root_explain(const corpus::Corpus& seed, llm::Backend& backend,
                                                     const PipelineConfig& config) {
  if (seed.chapters().empty()) throw ValidationError("EmptySeed", "seed corpus has no chapters");
  std::vector<corpus::ChapterNode> out = seed.chapters();
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (seed.pairs_in_chapter(out[i].id).empty()) {
      throw ValidationError("EmptyChapter", "seed chapter '" + out[i].name + "' has no titles");
    }
    if (trim(out[i].explanation).empty()) todo.push_back(i);
  }
  const auto& params = config.presets.at(llm::Stage::explain_chapters);
  parallel_for(todo.size(), config.jobs, [&](std::size_t k) {
    auto& node = out[todo[k]];
    prompt::PromptContext ctx;
    ctx.chapter = node;
    std::vector<std::string> titles;
    for (const auto* p : seed.pairs_in_chapter(node.id)) titles.push_back(p->title);
    ctx.titles = titles;
    auto c = backend.complete(llm::Stage::explain_chapters, prompt::render(prompt::PromptKind::explain_chapter, ctx),
                              params);
    std::string explanation;
    for (const auto& line : split_lines(c.text)) {
      if (!trim(line).empty()) {
        explanation = trim(line);
        break;
      }
    }
    if (explanation.empty()) throw IoError("EmptyExplanation", "blank explanation for chapter '" + node.name + "'");
    node.explanation = explanation;
  });
  return out;
}

std::vector<corpus::ChapterNode> taking_root_expand(GrowthPool& pool, const PipelineConfig& config,
                                                    llm::Backend& backend, Rng& rng) {
  const auto& ic = config.in_context;
  std::vector<std::size_t> seed_idx;
  for (std::size_t i = 0; i < pool.chapters.size(); ++i) {
    if (pool.chapters[i].origin == corpus::Origin::seed) seed_idx.push_back(i);
  }
  if (seed_idx.size() < ic.chapter_examples_from_seed) {
    throw ValidationError("TooFewSeedChapters", "need at least " + std::to_string(ic.chapter_examples_from_seed) +
                                                    " seed chapters, have " + std::to_string(seed_idx.size()));
  }
  const std::size_t from_generated = ic.chapter_examples_total - ic.chapter_examples_from_seed;
  const auto& params = config.presets.at(llm::Stage::expand_chapters);

  std::vector<corpus::ChapterNode> accepted;
  std::size_t fruitless = 0;
  while (pool.chapters.size() < config.targets.n_chapters) {
    std::vector<std::size_t> gen_idx;
    for (std::size_t i = 0; i < pool.chapters.size(); ++i) {
      if (pool.chapters[i].origin == corpus::Origin::generated) gen_idx.push_back(i);
    }
    std::vector<prompt::ExampleBlock> examples;
    if (gen_idx.size() < from_generated) {
      for (auto k : draw(rng, seed_idx.size(), ic.chapter_examples_total)) {
        examples.push_back({pool.chapters[seed_idx[k]], {}, std::nullopt});
      }
    } else {
      for (auto k : draw(rng, seed_idx.size(), ic.chapter_examples_from_seed)) {
        examples.push_back({pool.chapters[seed_idx[k]], {}, std::nullopt});
      }
      for (auto k : draw(rng, gen_idx.size(), from_generated)) {
        examples.push_back({pool.chapters[gen_idx[k]], {}, std::nullopt});
      }
    }
    prompt::PromptContext ctx;
    ctx.examples = examples;
    std::string cue = std::to_string(examples.size() + 1) + ". ";
    auto c = backend.complete(llm::Stage::expand_chapters, prompt::render(prompt::PromptKind::expand_chapter, ctx),
                              params);

    std::size_t gained = 0;
    for (auto& line : parse_chapter_lines(c.text, cue)) {
      if (!line.ok) {
        pool.log.push_back({"expand_chapters", "", line.raw, false, "parse-skip", 0.0, ""});
        continue;
      }
      if (pool.chapters.size() >= config.targets.n_chapters) {
        pool.log.push_back({"expand_chapters", "", line.name, false, "surplus", 0.0, ""});
        continue;
      }
      auto tokens = metrics::tokenize(line.name, metrics::TokenMode::lowercase_words);
      auto d = garden_accept_chapter(tokens, pool.chapter_tokens(), config.dedup_threshold);
      std::vector<std::string> names;
      for (const auto& ch : pool.chapters) names.push_back(ch.name);
      pool.log.push_back(dedup_entry("expand_chapters", "", line.name, d, names));
      if (!d.accepted) continue;
      corpus::ChapterNode node{format_id("gen-ch-", pool.n_generated_chapters() + 1, 4), line.name, line.explanation,
                               corpus::Origin::generated};
      pool.log.back().chapter_id = node.id;
      pool.add_chapter(node);
      accepted.push_back(node);
      ++gained;
    }
    if (gained == 0) {
      if (++fruitless >= config.stall_limit) stall("expand_chapters", fruitless);
    } else {
      fruitless = 0;
    }
  }
  return accepted;
}

std::vector<std::string> branching_out(const corpus::ChapterNode& node, const corpus::Corpus& seed, GrowthPool& pool,
                                       const PipelineConfig& config, llm::Backend& backend, Rng& rng) {
  if (!pool.find_chapter(node.id)) throw ValidationError("UnknownChapter", "chapter " + node.id + " is not pooled");

  struct Source {
    const corpus::ChapterNode* chapter;
    std::vector<std::string> titles;
  };
  std::vector<Source> sources;
  for (const auto& ch : pool.chapters) {
    if (ch.origin != corpus::Origin::seed || trim(ch.explanation).empty()) continue;
    Source s{&ch, {}};
    for (const auto* p : seed.pairs_in_chapter(ch.id)) {
      if (s.titles.size() == prompt::kTitlesPerExample) break;
      s.titles.push_back(p->title);
    }
    if (!s.titles.empty()) sources.push_back(std::move(s));
  }
  // Keep the target's own titles out of its prompt when there is room.
  if (sources.size() > config.in_context.title_examples) {
    std::erase_if(sources, [&](const Source& s) { return s.chapter->id == node.id; });
  }
  if (sources.empty()) throw ValidationError("EmptySeed", "no explained seed chapter with titles to sample from");

  const auto& params = config.presets.at(llm::Stage::generate_titles);
  std::vector<std::string> accepted;
  std::size_t fruitless = 0;
  auto have = [&] { return pool.titles_by_chapter[node.id].size(); };
  while (have() < config.targets.titles_per_chapter) {
    std::vector<prompt::ExampleBlock> examples;
    for (auto k : draw(rng, sources.size(), config.in_context.title_examples)) {
      examples.push_back({*sources[k].chapter, sources[k].titles, std::nullopt});
    }
    prompt::PromptContext ctx;
    ctx.examples = examples;
    ctx.chapter = node;
    auto c = backend.complete(llm::Stage::generate_titles, prompt::render(prompt::PromptKind::expand_title, ctx),
                              params);

    std::size_t gained = 0;
    for (auto& line : parse_title_lines(c.text)) {
      if (!line.ok) {
        pool.log.push_back({"generate_titles", node.id, line.raw, false, "parse-skip", 0.0, ""});
        continue;
      }
      if (have() >= config.targets.titles_per_chapter) {
        pool.log.push_back({"generate_titles", node.id, line.name, false, "surplus", 0.0, ""});
        continue;
      }
      auto tokens = metrics::tokenize(line.name, metrics::TokenMode::lowercase_words);
      auto d = garden_accept_title(tokens, pool.title_tokens(node.id, config.title_scope), config.dedup_threshold);
      pool.log.push_back(
          dedup_entry("generate_titles", node.id, line.name, d, pool.title_texts(node.id, config.title_scope)));
      if (!d.accepted) continue;
      pool.add_title(node.id, line.name, true);
      accepted.push_back(line.name);
      ++gained;
    }
    if (gained == 0) {
      if (++fruitless >= config.stall_limit) stall("generate_titles for " + node.id, fruitless);
    } else {
      fruitless = 0;
    }
  }
  return accepted;
}

std::string draft_story(const corpus::ChapterNode& node, const std::string& title,
                        const std::vector<corpus::StoryPair>& examples,
                        const std::function<const corpus::ChapterNode*(std::string_view)>& chapter_of,
                        const PipelineConfig& config, llm::Backend& backend, Rng& rng) {
  if (examples.empty()) throw ValidationError("EmptySeed", "no stories to use as examples");
  std::vector<prompt::ExampleBlock> blocks;
  for (auto k : draw(rng, examples.size(), config.in_context.story_examples)) {
    const auto* ch = chapter_of(examples[k].chapter_id);
    if (!ch) throw ValidationError("UnknownChapter", "example story " + examples[k].id + " has no chapter");
    blocks.push_back({*ch, {}, examples[k]});
  }
  prompt::PromptContext ctx;
  ctx.examples = blocks;
  ctx.chapter = node;
  corpus::StoryPair target;
  target.title = title;
  ctx.pair = target;
  auto c = backend.complete(llm::Stage::generate_stories, prompt::render(prompt::PromptKind::complete_story, ctx),
                            config.presets.at(llm::Stage::generate_stories));
  return story_raw_text(title, c.text);
}

StoryOutcome bearing_star_fruits(const corpus::ChapterNode& node, const std::string& title,
                                 const corpus::Corpus& seed, const GrowthPool& pool, const PipelineConfig& config,
                                 llm::Backend& backend, Rng& rng) {
  auto chapter_of = [&](std::string_view id) {
    const auto* ch = pool.find_chapter(id);
    return ch ? ch : seed.find_chapter(id);
  };
  StoryOutcome out;
  out.raw = draft_story(node, title, seed.pairs(), chapter_of, config, backend, rng);
  lint::StoryStructure st;
  try {
    st = lint::parse_story(out.raw);
  } catch (const ValidationError&) {
    out.reasons.push_back("parse-failure");
    return out;
  }
  auto d = garden_accept_story(st.parts, config.max_story_words);
  if (!d.accepted) {
    out.reasons = d.reasons;
    return out;
  }
  corpus::StoryPair pair;
  pair.chapter_id = node.id;
  pair.title = title;
  pair.content = {trim(st.parts.introduction), trim(st.parts.main_body), trim(st.parts.conclusion)};
  pair.origin = corpus::Origin::generated;
  out.pair = std::move(pair);
  return out;
}

}  // namespace ssbench::starsow
