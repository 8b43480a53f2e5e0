#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ssbench/corpus.hpp"
#include "ssbench/error.hpp"
#include "test_paths.hpp"

using namespace ssbench;
using namespace ssbench::corpus;

namespace {

Corpus make_corpus(std::size_t n_pairs) {
  std::vector<ChapterNode> chapters = {{"c1", "Play", "Shows games.", Origin::seed}};
  std::vector<StoryPair> pairs;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    pairs.push_back({"p" + std::to_string(i), "c1", "Title " + std::to_string(i), {"In.", "Body.", "End."},
                     Origin::seed});
  }
  return Corpus(chapters, pairs);
}

// Round half up on 0.8N and 0.1N with integer arithmetic.
SplitSizes oracle_sizes(std::size_t n) {
  std::size_t train = (8 * n + 5) / 10;
  std::size_t val = (n + 5) / 10;
  return {train, val, n - train - val};
}

}  // namespace

TEST_CASE("seed fixture has 14 chapters and 179 pairs") {
  auto c = load_corpus(testing::fixture("compliant.jsonl"));
  CHECK(c.chapters().size() == 14);
  CHECK(c.pairs().size() == 179);
  c.validate();
}

TEST_CASE("serialize and parse round trip byte for byte") {
  auto c = load_corpus(testing::fixture("compliant.jsonl"));
  std::string text = serialize_corpus(c);
  std::istringstream in(text);
  auto back = parse_corpus(in);
  CHECK(back == c);
  CHECK(serialize_corpus(back) == text);
}

TEST_CASE("parse errors name the line") {
  std::istringstream bad("{\"kind\":\"chapter\",\"id\":\"c\",\"name\":\"N\",\"explanation\":\"\",\"origin\":\"seed\"}\n"
                         "{\"kind\":\"pair\",\"id\":\"p\"}\n");
  try {
    parse_corpus(bad, "mem");
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::istringstream garbage("not json\n");
  CHECK_THROWS_AS(parse_corpus(garbage), ValidationError);
}

TEST_CASE("validate rejects broken invariants") {
  ChapterNode ch{"c1", "Play", "Shows games.", Origin::seed};
  StoryPair p{"p1", "c1", "Sharing Toys", {"a.", "b.", "c."}, Origin::seed};
  SUBCASE("dangling chapter") {
    auto q = p;
    q.chapter_id = "zz";
    CHECK_THROWS_AS(Corpus({ch}, {q}).validate(), ValidationError);
  }
  SUBCASE("duplicate normalized title in one chapter") {
    auto q = p;
    q.id = "p2";
    q.title = "  sharing   TOYS ";
    CHECK_THROWS_AS(Corpus({ch}, {p, q}).validate(), ValidationError);
  }
  SUBCASE("duplicate ids") {
    CHECK_THROWS_AS(Corpus({ch}, {p, p}).validate(), ValidationError);
  }
  SUBCASE("empty title") {
    auto q = p;
    q.title = " ";
    CHECK_THROWS_AS(Corpus({ch}, {q}).validate(), ValidationError);
  }
}

TEST_CASE("split sizes follow 0.8/0.1/remainder with half-up rounding") {
  for (std::size_t n = 10; n <= 6000; ++n) {
    auto s = split_sizes(n);
    auto o = oracle_sizes(n);
    CAPTURE(n);
    REQUIRE(s.train == o.train);
    REQUIRE(s.validation == o.validation);
    REQUIRE(s.test == o.test);
  }
  CHECK(split_sizes(10).train == 8);
  CHECK(split_sizes(10).validation == 1);
  CHECK(split_sizes(10).test == 1);
  auto big = split_sizes(5085);
  CHECK(big.train == 4068);
  CHECK(big.validation == 509);
  CHECK(big.test == 508);
}

TEST_CASE("split partitions ids and is deterministic per seed") {
  for (std::size_t n : {10u, 100u, 257u}) {
    auto c = make_corpus(n);
    auto a = split_dataset(c, 42);
    auto b = split_dataset(c, 42);
    CHECK(a == b);
    std::multiset<std::string> all;
    for (auto* part : {&a.train, &a.validation, &a.test}) all.insert(part->begin(), part->end());
    CHECK(all.size() == n);
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == n);
    CHECK(split_dataset(c, 43) != a);
  }
  CHECK_THROWS_AS(split_dataset(make_corpus(9), 1), ValidationError);
}

TEST_CASE("split manifest round trips") {
  auto s = split_dataset(make_corpus(20), 7);
  CHECK(parse_split(serialize_split(s)) == s);
  CHECK(serialize_split(s).find("\"seed\":7") != std::string::npos);
}

TEST_CASE("corpus statistics match a hand count") {
  std::vector<ChapterNode> chapters = {{"c1", "Play Time", "", Origin::seed}, {"c2", "School", "", Origin::seed}};
  std::vector<StoryPair> pairs = {
      {"p1", "c1", "Sharing Toys", {"One two.", "Three four five.", "Six."}, Origin::seed},
      {"p2", "c1", "Taking Turns Nicely", {"A.", "B c.", "D e f g."}, Origin::seed},
      {"p3", "c2", "Raising My Hand", {"x", "y", "z"}, Origin::seed},
  };
  auto st = compute_stats(Corpus(chapters, pairs));
  CHECK(st.n_chapters == 2);
  CHECK(st.n_pairs == 3);
  CHECK(st.min_titles_per_chapter == 1);
  CHECK(st.avg_chapter_len_words == doctest::Approx(1.5));
  CHECK(st.avg_title_len_words == doctest::Approx(8.0 / 3.0));
  CHECK(st.avg_content_len_words == doctest::Approx((6.0 + 7.0 + 3.0) / 3.0));
}
