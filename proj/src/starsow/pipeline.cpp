#include <cstdio>
#include <atomic>

#include <json.hpp>

#include "ssbench/parallel.hpp"
#include "ssbench/error.hpp"
#include "ssbench/starsow.hpp"
#include "ssbench/util.hpp"

namespace ssbench::starsow {

using nlohmann::ordered_json;

namespace {

class CountingBackend : public llm::Backend {
 public:
  explicit CountingBackend(llm::Backend& inner) : inner_(inner) {}
  llm::Completion complete(llm::Stage stage, const std::string& prompt, const llm::GenerationParams& params) override {
    ++calls_;
    return inner_.complete(stage, prompt, params);
  }
  std::string name() const override { return inner_.name(); }
  std::size_t calls() const { return calls_.load(); }

 private:
  llm::Backend& inner_;
  std::atomic<std::size_t> calls_{0};
};

template <typename Fn>
void with_stage_context(StageId stage, Fn&& fn) {
  auto prefix = "stage " + std::to_string(static_cast<int>(stage)) + " (" + std::string(to_string(stage)) + "): ";
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(e.code(), prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(e.code(), prefix + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), prefix + e.what());
  }
}

struct StorySlot {
  const corpus::ChapterNode* chapter;
  std::string title;
  std::size_t index;
};

}  // namespace

std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::taking_root: return "taking_root";
    case StageId::branching_out: return "branching_out";
    case StageId::bearing_star_fruits: return "bearing_star_fruits";
    case StageId::gardening_work: return "gardening_work";
  }
  return "?";
}

std::string checkpoint_name(StageId stage) { return "stage-" + std::to_string(static_cast<int>(stage)) + ".jsonl"; }

PipelineConfig PipelineConfig::from(const Config& config) {
  PipelineConfig pc;
  pc.targets.n_chapters = static_cast<std::size_t>(config.get_int("pipeline.n_chapters", 14));
  pc.targets.titles_per_chapter = static_cast<std::size_t>(config.get_int("pipeline.titles_per_chapter", 70));
  pc.targets.stories_per_title = static_cast<std::size_t>(config.get_int("pipeline.stories_per_title", 1));
  pc.rng_seed = static_cast<std::uint64_t>(config.get_int("run.seed", 0));
  pc.dedup_threshold = config.get_double("pipeline.dedup_threshold", 0.7);
  pc.stall_limit = static_cast<std::size_t>(config.get_int("pipeline.stall_limit", 20));
  pc.max_story_words = static_cast<std::size_t>(config.get_int("pipeline.max_story_words", 400));
  pc.jobs = static_cast<std::size_t>(config.get_int("run.jobs", 4));
  std::string scope = config.get_string("pipeline.title_dedup_scope", "global");
  if (scope == "global") {
    pc.title_scope = TitleScope::global;
  } else if (scope == "chapter") {
    pc.title_scope = TitleScope::per_chapter;
  } else {
    throw ValidationError("InvalidConfig", "pipeline.title_dedup_scope must be 'global' or 'chapter'");
  }
  std::string dir = config.get_string("pipeline.checkpoint_dir", "");
  if (!dir.empty()) pc.checkpoint_dir = dir;
  pc.validate();
  return pc;
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& why) { throw ValidationError("InvalidConfig", why); };
  if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) bad("dedup_threshold must be in (0, 1]");
  if (stall_limit == 0) bad("stall_limit must be positive");
  if (max_story_words == 0) bad("max_story_words must be positive");
  if (targets.stories_per_title == 0) bad("stories_per_title must be positive");
  if (in_context.chapter_examples_total != prompt::kChapterExamples ||
      in_context.title_examples != prompt::kTitleExamples || in_context.story_examples != prompt::kStoryExamples) {
    bad("in-context example counts must be 8/8/4");
  }
  if (in_context.chapter_examples_from_seed > in_context.chapter_examples_total) {
    bad("chapter_examples_from_seed exceeds chapter_examples_total");
  }
  for (auto stage : llm::kAllStages) {
    if (!presets.count(stage)) bad("missing preset for " + std::string(llm::to_string(stage)));
    presets.at(stage).validate();
  }
}

PipelineResult run_pipeline(const corpus::Corpus& seed, const PipelineConfig& config, llm::Backend& backend) {
  config.validate();
  seed.validate();
  CountingBackend counted(backend);

  GrowthPool pool;
  if (config.checkpoint_dir) {
    for (int s = 4; s >= 1; --s) {
      auto path = *config.checkpoint_dir / checkpoint_name(static_cast<StageId>(s));
      if (std::filesystem::exists(path)) {
        pool = parse_pool(read_file(path), config.rng_seed);
        break;
      }
    }
  }
  auto checkpoint = [&](StageId stage) {
    pool.completed_stage = static_cast<int>(stage);
    if (!config.checkpoint_dir) return;
    std::filesystem::create_directories(*config.checkpoint_dir);
    write_file(*config.checkpoint_dir / checkpoint_name(stage), serialize_pool(pool, config.rng_seed));
  };

  if (pool.completed_stage < 1) {
    with_stage_context(StageId::taking_root, [&] {
      for (auto& node : taking_root_explain(seed, counted, config)) pool.add_chapter(std::move(node));
      for (const auto& p : seed.pairs()) pool.add_title(p.chapter_id, p.title, false);
      Rng rng = derive_rng(config.rng_seed, "expand_chapters");
      taking_root_expand(pool, config, counted, rng);
    });
    checkpoint(StageId::taking_root);
  }

  if (pool.completed_stage < 2) {
    with_stage_context(StageId::branching_out, [&] {
      std::vector<corpus::ChapterNode> chapters = pool.chapters;
      for (const auto& node : chapters) {
        if (pool.titles_by_chapter[node.id].size() >= config.targets.titles_per_chapter) continue;
        Rng rng = derive_rng(config.rng_seed, "generate_titles:" + node.id);
        branching_out(node, seed, pool, config, counted, rng);
      }
    });
    checkpoint(StageId::branching_out);
  }

  if (pool.completed_stage < 3) {
    with_stage_context(StageId::bearing_star_fruits, [&] {
      std::vector<StorySlot> slots;
      for (const auto& ch : pool.chapters) {
        for (const auto& t : pool.generated_titles) {
          if (t.chapter_id != ch.id) continue;
          for (std::size_t k = 0; k < config.targets.stories_per_title; ++k) slots.push_back({&ch, t.title, k});
        }
      }
      std::vector<std::optional<corpus::StoryPair>> results(slots.size());
      std::vector<std::vector<LogEntry>> logs(slots.size());
      parallel_for(slots.size(), config.jobs, [&](std::size_t i) {
        const auto& slot = slots[i];
        Rng rng = derive_rng(config.rng_seed,
                             "generate_stories:" + slot.chapter->id + ":" + slot.title + ":" + std::to_string(slot.index));
        for (std::size_t attempt = 0; attempt < config.stall_limit; ++attempt) {
          auto outcome = bearing_star_fruits(*slot.chapter, slot.title, seed, pool, config, counted, rng);
          logs[i].push_back({"generate_stories", slot.chapter->id, slot.title, outcome.pair.has_value(),
                             join(outcome.reasons, ","), 0.0, ""});
          if (outcome.pair) {
            results[i] = std::move(outcome.pair);
            break;
          }
        }
      });
      std::size_t n = 0;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        for (auto& e : logs[i]) pool.log.push_back(std::move(e));
        if (!results[i]) continue;
        char id[32];
        std::snprintf(id, sizeof id, "gen-pair-%05zu", ++n);
        results[i]->id = id;
        pool.stories.push_back(std::move(*results[i]));
      }
    });
    checkpoint(StageId::bearing_star_fruits);
  }

  PipelineResult result;
  with_stage_context(StageId::gardening_work, [&] {
    result.audit = audit_pool(pool, config);
    if (!result.audit.violations.empty()) {
      throw Error("InvariantViolation", join(result.audit.violations, "; "));
    }
  });
  if (pool.completed_stage < 4) checkpoint(StageId::gardening_work);

  std::vector<corpus::StoryPair> pairs = seed.pairs();
  pairs.insert(pairs.end(), pool.stories.begin(), pool.stories.end());
  result.corpus = corpus::Corpus(pool.chapters, std::move(pairs));
  result.corpus.validate();
  result.pool = std::move(pool);
  result.backend_calls = counted.calls();
  return result;
}

std::string manifest_json(const PipelineConfig& config, const PipelineResult& result, const Config& raw_config,
                          std::string_view backend_name) {
  ordered_json m;
  m["tool"] = "ssbench grow";
  m["created_at"] = utc_timestamp();
  m["rng_seed"] = config.rng_seed;
  m["backend"] = backend_name;
  m["template_version"] = prompt::TemplateSet::builtin().version();
  m["lexicon_version"] = lint::LintConfig::builtin().lexicon_version;
  m["checkpoint_format_version"] = kCheckpointVersion;
  m["targets"] = {{"n_chapters", config.targets.n_chapters},
                  {"titles_per_chapter", config.targets.titles_per_chapter},
                  {"stories_per_title", config.targets.stories_per_title}};
  m["dedup_threshold"] = config.dedup_threshold;
  m["stall_limit"] = config.stall_limit;
  m["title_dedup_scope"] = config.title_scope == TitleScope::global ? "global" : "chapter";
  m["max_story_words"] = config.max_story_words;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : raw_config.entries()) cfg[k] = raw_config.get_string(k, v);
  m["config"] = cfg;

  std::size_t rejected = 0;
  for (const auto& e : result.pool.log) rejected += !e.accepted;
  std::size_t seed_pairs = result.corpus.pairs().size() - result.pool.stories.size();
  m["counts"] = {{"chapters", result.corpus.chapters().size()},
                 {"generated_chapters", result.pool.n_generated_chapters()},
                 {"generated_titles", result.pool.generated_titles.size()},
                 {"seed_pairs", seed_pairs},
                 {"generated_pairs", result.pool.stories.size()},
                 {"log_entries", result.pool.log.size()},
                 {"rejections", rejected}};
  m["backend_calls"] = result.backend_calls;
  return m.dump(2) + "\n";
}

}  // namespace ssbench::starsow
