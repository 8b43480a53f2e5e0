#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/eval.hpp"
#include "ssbench/parallel.hpp"
#include "ssbench/util.hpp"

namespace ssbench::eval {

using nlohmann::ordered_json;

std::vector<corpus::StoryPair> sample_pairs(const corpus::Corpus& corpus, std::size_t size, std::uint64_t seed) {
  Rng rng = derive_rng(seed, "regen-sample");
  std::vector<corpus::StoryPair> out;
  for (auto i : sample_indices(rng, corpus.pairs().size(), size)) out.push_back(corpus.pairs()[i]);
  return out;
}

RegenResult regenerate_and_rate(const std::vector<corpus::StoryPair>& sample, const corpus::Corpus& corpus,
                                llm::Backend& backend, const starsow::PipelineConfig& config,
                                const lint::LintConfig& lint_config) {
  RegenResult result;
  result.items.resize(sample.size());
  auto chapter_of = [&](std::string_view id) { return corpus.find_chapter(id); };
  parallel_for(sample.size(), config.jobs, [&](std::size_t i) {
    const auto& src = sample[i];
    auto& item = result.items[i];
    item.source_id = src.id;
    item.chapter_id = src.chapter_id;
    item.title = src.title;
    try {
      const auto* chapter = corpus.find_chapter(src.chapter_id);
      if (!chapter) throw ValidationError("UnknownChapter", "pair " + src.id + " has no chapter in the corpus");
      Rng rng = derive_rng(config.rng_seed, "regen:" + src.id);
      item.raw = starsow::draft_story(*chapter, src.title, corpus.pairs(), chapter_of, config, backend, rng);
      item.report = lint::lint_text(src.id, item.raw, lint_config);
    } catch (const Error& e) {
      item.error = e.code() + ": " + e.what();
    }
  });
  std::vector<lint::QualityReport> reports;
  for (const auto& item : result.items) {
    if (item.report) reports.push_back(*item.report);
  }
  result.summary = lint::summarize(reports);
  return result;
}

std::string serialize_regen(const RegenResult& result) {
  ordered_json items = ordered_json::array();
  for (const auto& item : result.items) {
    ordered_json j;
    j["source_id"] = item.source_id;
    j["chapter_id"] = item.chapter_id;
    j["title"] = item.title;
    j["raw"] = item.raw;
    if (item.report) {
      j["report"] = ordered_json::parse(lint::serialize_report(*item.report));
    } else {
      j["error"] = item.error;
    }
    items.push_back(std::move(j));
  }
  ordered_json out;
  out["summary"] = ordered_json::parse(lint::serialize_summary(result.summary));
  out["items"] = items;
  return out.dump(2) + "\n";
}

}  // namespace ssbench::eval
