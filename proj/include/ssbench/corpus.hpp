#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ssbench::corpus {

enum class Origin { seed, generated };

std::string_view to_string(Origin o);
Origin origin_from_string(std::string_view s);

// A themed root node: chapter name plus a one-sentence explanation that
// starts with a verb. Seed chapters may arrive without an explanation; the
// Taking Root stage fills it in.
struct ChapterNode {
  std::string id;
  std::string name;
  std::string explanation;
  Origin origin = Origin::seed;

  bool operator==(const ChapterNode&) const = default;
};

struct StoryContent {
  std::string introduction;
  std::string main_body;
  std::string conclusion;

  // Parts joined with single newlines; the reference text used for metrics.
  std::string joined() const;
  bool operator==(const StoryContent&) const = default;
};

struct StoryPair {
  std::string id;
  std::string chapter_id;
  std::string title;
  StoryContent content;
  Origin origin = Origin::seed;

  bool operator==(const StoryPair&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<ChapterNode> chapters, std::vector<StoryPair> pairs);

  const std::vector<ChapterNode>& chapters() const { return chapters_; }
  const std::vector<StoryPair>& pairs() const { return pairs_; }

  const ChapterNode* find_chapter(std::string_view id) const;
  const StoryPair* find_pair(std::string_view id) const;
  std::vector<const StoryPair*> pairs_in_chapter(std::string_view chapter_id) const;

  // Throws ValidationError on any broken invariant: empty names/titles,
  // duplicate ids, dangling chapter_id, duplicate normalized chapter names or
  // duplicate normalized titles within a chapter.
  void validate() const;

  bool operator==(const Corpus& other) const {
    return chapters_ == other.chapters_ && pairs_ == other.pairs_;
  }

 private:
  void reindex();

  std::vector<ChapterNode> chapters_;
  std::vector<StoryPair> pairs_;
  std::unordered_map<std::string, std::size_t> chapter_index_;
  std::unordered_map<std::string, std::size_t> pair_index_;
};

// JSONL, one `kind`-tagged record per line. Errors name the line number.
Corpus parse_corpus(std::istream& in, std::string_view source = "<stream>");
Corpus load_corpus(const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct SplitDataset {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  bool operator==(const SplitDataset&) const = default;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// 8:1:1 with round-half-up on train and validation; remainder to test.
SplitSizes split_sizes(std::size_t n);

// Seeded uniform permutation of pair ids, then sliced. Needs >= 10 pairs.
SplitDataset split_dataset(const Corpus& corpus, std::uint64_t seed);
std::string serialize_split(const SplitDataset& split);
SplitDataset parse_split(std::string_view json);

struct CorpusStats {
  std::size_t n_chapters = 0;
  std::size_t min_titles_per_chapter = 0;
  std::size_t n_pairs = 0;
  double avg_chapter_len_words = 0.0;
  double avg_title_len_words = 0.0;
  double avg_content_len_words = 0.0;
};

CorpusStats compute_stats(const Corpus& corpus);
std::string serialize_stats(const CorpusStats& stats);

}  // namespace ssbench::corpus
