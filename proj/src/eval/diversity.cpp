#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "ssbench/eval.hpp"
#include "ssbench/parallel.hpp"

namespace ssbench::eval {

using nlohmann::ordered_json;

namespace {

constexpr const char* kHeuristicNote =
    "verb-noun pairs come from a lexicon and suffix-rule heuristic, not a constituency parser";

template <std::size_t N>
ordered_json to_json(const std::array<std::size_t, N>& a) {
  ordered_json arr = ordered_json::array();
  for (auto v : a) arr.push_back(v);
  return arr;
}

std::string bin_label(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "[%.2f,%.2f%c", i * 0.05, (i + 1) * 0.05, i + 1 == kSimilarityBins ? ']' : ')');
  return buf;
}

}  // namespace

std::size_t similarity_bin(double score) {
  if (!(score > 0.0)) return 0;
  auto bin = static_cast<std::size_t>(std::floor(score * kSimilarityBins + 1e-9));
  return std::min(bin, kSimilarityBins - 1);
}

DiversityReport diversity_report(const corpus::Corpus& generated, const corpus::Corpus& seed, std::size_t jobs) {
  std::vector<const corpus::StoryPair*> items;
  for (const auto& p : generated.pairs()) {
    if (p.origin == corpus::Origin::generated) items.push_back(&p);
  }
  if (items.empty()) {
    for (const auto& p : generated.pairs()) items.push_back(&p);
  }

  std::vector<metrics::TokenSequence> seed_titles, seed_contents;
  for (const auto& p : seed.pairs()) {
    seed_titles.push_back(metrics::tokenize(p.title));
    seed_contents.push_back(metrics::tokenize(p.content.joined()));
  }

  DiversityReport r;
  r.n_items = items.size();
  r.title_scores.assign(items.size(), 0.0);
  r.content_scores.assign(items.size(), 0.0);
  if (!seed_titles.empty()) {
    parallel_for(items.size(), jobs, [&](std::size_t i) {
      r.title_scores[i] = metrics::nearest_seed_similarity(metrics::tokenize(items[i]->title), seed_titles).score;
      r.content_scores[i] =
          metrics::nearest_seed_similarity(metrics::tokenize(items[i]->content.joined()), seed_contents).score;
    });
  }

  std::map<VerbNoun, std::size_t> counts;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ++r.title_similarity[similarity_bin(r.title_scores[i])];
    ++r.content_similarity[similarity_bin(r.content_scores[i])];
    std::size_t tw = metrics::word_count(items[i]->title);
    ++r.title_lengths[std::min(tw, kTitleLengthBins - 1)];
    const auto& c = items[i]->content;
    std::size_t cw = metrics::word_count(c.introduction) + metrics::word_count(c.main_body) +
                     metrics::word_count(c.conclusion);
    ++r.content_lengths[std::min(cw / kContentLengthBinWidth, kContentLengthBins - 1)];
    if (auto vn = extract_verb_noun(items[i]->title)) {
      ++counts[*vn];
    } else {
      ++r.titles_without_verb;
    }
  }
  r.verb_noun_counts.assign(counts.begin(), counts.end());
  std::stable_sort(r.verb_noun_counts.begin(), r.verb_noun_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return r;
}

std::string serialize_diversity(const DiversityReport& r, std::size_t top_k) {
  ordered_json j;
  j["n_items"] = r.n_items;
  j["similarity_bin_width"] = 0.05;
  j["title_nearest_seed_rougeL"] = to_json(r.title_similarity);
  j["content_nearest_seed_rougeL"] = to_json(r.content_similarity);
  j["title_length_words"] = {{"bins", "one per word count 0..19, last bin 20+"}, {"counts", to_json(r.title_lengths)}};
  j["content_length_words"] = {{"bins", "25-word bins from 0, last bin 500+"}, {"counts", to_json(r.content_lengths)}};
  ordered_json vn = ordered_json::array();
  for (std::size_t i = 0; i < r.verb_noun_counts.size() && i < top_k; ++i) {
    const auto& [pair, n] = r.verb_noun_counts[i];
    vn.push_back({{"verb", pair.verb}, {"noun", pair.noun}, {"count", n}});
  }
  j["verb_noun"] = {{"method", "heuristic"}, {"note", kHeuristicNote}, {"top", vn},
                    {"titles_without_verb", r.titles_without_verb}};
  return j.dump(2) + "\n";
}

std::string format_diversity(const DiversityReport& r, std::size_t top_k) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "items: %zu\n\n%-13s %8s %8s\n", r.n_items, "rougeL bin", "titles", "contents");
  out += line;
  for (std::size_t i = 0; i < kSimilarityBins; ++i) {
    std::snprintf(line, sizeof line, "%-13s %8zu %8zu\n", bin_label(i).c_str(), r.title_similarity[i],
                  r.content_similarity[i]);
    out += line;
  }
  out += "\ntop verb-noun pairs (heuristic; ";
  out += kHeuristicNote;
  out += ")\n";
  for (std::size_t i = 0; i < r.verb_noun_counts.size() && i < top_k; ++i) {
    const auto& [pair, n] = r.verb_noun_counts[i];
    std::snprintf(line, sizeof line, "  %-14s %-16s %5zu\n", pair.verb.c_str(),
                  pair.noun.empty() ? "-" : pair.noun.c_str(), n);
    out += line;
  }
  std::snprintf(line, sizeof line, "titles without a verb: %zu\n", r.titles_without_verb);
  out += line;
  return out;
}

}  // namespace ssbench::eval
