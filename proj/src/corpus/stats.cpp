#include <algorithm>
#include <map>

#include <json.hpp>

#include "ssbench/corpus.hpp"
#include "ssbench/metrics.hpp"

namespace ssbench::corpus {

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats s;
  s.n_chapters = corpus.chapters().size();
  s.n_pairs = corpus.pairs().size();

  std::map<std::string, std::size_t> per_chapter;
  for (const auto& c : corpus.chapters()) per_chapter[c.id] = 0;

  double chapter_words = 0, title_words = 0, content_words = 0;
  for (const auto& c : corpus.chapters()) chapter_words += static_cast<double>(metrics::word_count(c.name));
  for (const auto& p : corpus.pairs()) {
    ++per_chapter[p.chapter_id];
    title_words += static_cast<double>(metrics::word_count(p.title));
    content_words += static_cast<double>(metrics::word_count(p.content.introduction) +
                                         metrics::word_count(p.content.main_body) +
                                         metrics::word_count(p.content.conclusion));
  }
  if (!per_chapter.empty()) {
    s.min_titles_per_chapter =
        std::min_element(per_chapter.begin(), per_chapter.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; })
            ->second;
  }
  if (s.n_chapters > 0) s.avg_chapter_len_words = chapter_words / static_cast<double>(s.n_chapters);
  if (s.n_pairs > 0) {
    s.avg_title_len_words = title_words / static_cast<double>(s.n_pairs);
    s.avg_content_len_words = content_words / static_cast<double>(s.n_pairs);
  }
  return s;
}

std::string serialize_stats(const CorpusStats& s) {
  nlohmann::ordered_json j{{"n_chapters", s.n_chapters},
                           {"min_titles_per_chapter", s.min_titles_per_chapter},
                           {"n_pairs", s.n_pairs},
                           {"avg_chapter_len_words", s.avg_chapter_len_words},
                           {"avg_title_len_words", s.avg_title_len_words},
                           {"avg_content_len_words", s.avg_content_len_words}};
  return j.dump(2) + "\n";
}

}  // namespace ssbench::corpus
