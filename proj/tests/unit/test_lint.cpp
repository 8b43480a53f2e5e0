#include <doctest.h>

#include <random>

#include "ssbench/corpus.hpp"
#include "ssbench/error.hpp"
#include "ssbench/lint.hpp"
#include "test_paths.hpp"

using namespace ssbench;
using namespace ssbench::lint;

namespace {

std::string story(const std::string& intro, const std::string& body, const std::string& concl,
                  const std::string& title = "Going to the Park") {
  return labeled_text(title, {intro, body, concl});
}

const CheckResult& result(const QualityReport& r, CheckId id) { return r.result(id); }

std::string repeat(const std::string& sentence, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + sentence;
  return out;
}

}  // namespace

TEST_CASE("lexicon parsing requires a version header and supports wildcards") {
  auto lex = Lexicon::parse("# version: 3\n# comment\nmy * will help me *\n\nSort Of\n", "t");
  CHECK(lex.version == 3);
  REQUIRE(lex.phrases.size() == 2);
  CHECK(lex.phrases[1] == std::vector<std::string>{"sort", "of"});
  CHECK_THROWS_AS(Lexicon::parse("bad\n", "t"), ValidationError);

  auto tokens = metrics::tokenize_with_offsets("Then my teacher will help me read.");
  auto hits = find_phrases(tokens, lex);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].first_token == 1);
  CHECK(hits[0].last_token == 6);
}

TEST_CASE("longest phrase wins at a start position") {
  auto lex = Lexicon::parse("# version: 1\ni will\ni will try to\n", "c");
  auto tokens = metrics::tokenize_with_offsets("I will try to wait.");
  auto hits = find_phrases(tokens, lex);
  REQUIRE(hits.size() == 1);
  CHECK(phrase_text(lex, hits[0].phrase) == "i will try to");
}

TEST_CASE("builtin lexicons load at version 1") {
  const auto& cfg = LintConfig::builtin();
  CHECK(cfg.lexicon_version == 1);
  CHECK_FALSE(cfg.coaching.phrases.empty());
  CHECK_FALSE(cfg.stopwords.empty());
  CHECK_THROWS_AS(LintConfig::load(testing::templates_dir() / ".." / "lexicons", 2), ValidationError);
}

TEST_CASE("sentence segmentation") {
  CHECK(segment_sentences("I wave. Mr. Lee waves back! Is it fun?") ==
        std::vector<std::string>{"I wave.", "Mr. Lee waves back!", "Is it fun?"});
  CHECK(segment_sentences("She says \"hi.\" Then we go.") ==
        std::vector<std::string>{"She says \"hi.\"", "Then we go."});
  CHECK(segment_sentences("The score was 3.5 today") == std::vector<std::string>{"The score was 3.5 today"});
  CHECK(segment_sentences("Wait... what?! Okay") == std::vector<std::string>{"Wait...", "what?!", "Okay"});
  CHECK(segment_sentences("   ").empty());
}

TEST_CASE("classification follows the rule table") {
  CHECK(classify_sentence("The bus is yellow.").kind == SentenceKind::descriptive);
  auto c = classify_sentence("Next time I will try to breathe slowly.");
  CHECK(c.kind == SentenceKind::coaching);
  CHECK(c.rule == "i will try to");
  CHECK(classify_sentence("My mom will help me tie my shoes.").kind == SentenceKind::coaching);
  CHECK(classify_sentence("It is a good idea to wash hands.").kind == SentenceKind::coaching);
}

TEST_CASE("parse_story handles labels, numbering and errors") {
  auto st = parse_story("# TITLE #: Lunch\n2) ## introduction ##\nWe eat.\n3. # Main Body #: Food is warm.\n"
                        "# Conclusion #:\nLunch ends.");
  CHECK(st.title == "Lunch");
  CHECK(st.parts.introduction == "We eat.");
  CHECK(st.parts.main_body == "Food is warm.");
  CHECK(st.sentences.size() == 3);

  try {
    parse_story("# Title #: A\n# Introduction #: B.\n# Conclusion #: D.");
    FAIL("expected MissingPart");
  } catch (const ValidationError& e) {
    CHECK(e.code() == "MissingPart");
  }
  try {
    parse_story("# Title #: A\n# Main Body #: C.\n# Introduction #: B.\n# Conclusion #: D.");
    FAIL("expected OrderViolation");
  } catch (const ValidationError& e) {
    CHECK(e.code() == "OrderViolation");
  }
}

TEST_CASE("descriptive orientation agrees with a ratio oracle over a grid") {
  const std::string d = "The room is bright.";
  const std::string c = "I will try to sit still.";
  for (int nd = 0; nd <= 8; ++nd) {
    for (int nc = 0; nc <= 5; ++nc) {
      if (nd + nc == 0) continue;
      std::string body = repeat(d, nd) + (nd && nc ? " " : "") + repeat(c, nc);
      StoryStructure st;
      st.title = "T";
      st.parts.main_body = body;
      for (std::size_t i = 0; auto& s : segment_sentences(body)) {
        auto k = classify_sentence(s);
        st.sentences.push_back({s, i++, Part::main_body, k.kind, k.rule});
      }
      bool oracle = nd > 0 && (nc == 0 || static_cast<double>(nd) / nc >= 2.0);
      CAPTURE(nd);
      CAPTURE(nc);
      CHECK(check_descriptive_orientation(st).passed == oracle);
    }
  }
}

TEST_CASE("descriptive orientation boundary cases through lint_text") {
  auto run = [](int nd, int nc) {
    std::string body = repeat("The room is bright.", nd) + " " + repeat("I will try to sit still.", nc);
    return lint_text("s", story("We are at school.", body, "The day ends."), LintConfig::builtin());
  };
  // intro and conclusion add two descriptive sentences.
  CHECK(run(2, 2).do_qualified);   // 4:2
  CHECK(run(4, 2).do_qualified);   // 6:2
  CHECK_FALSE(run(1, 2).do_qualified);  // 3:2
  auto none = lint_text("s", story("A.", "B.", "C."), LintConfig::builtin());
  CHECK(none.do_qualified);
  CHECK(std::isinf(none.ratio_descriptive_coaching));
}

TEST_CASE("perspective check") {
  auto r = lint_text("s", story("You go to school.", "I see a bus.", "We sit."), LintConfig::builtin());
  CHECK_FALSE(result(r, CheckId::SS_Q1A).passed);
  CHECK(result(r, CheckId::SS_Q1A).evidence[0].span == "You");
  CHECK(result(r, CheckId::SS_Q1B).passed);

  auto neg = lint_text("s", story("I was angry.", "I kicked the chair.", "He kicked a ball."), LintConfig::builtin());
  CHECK(result(neg, CheckId::SS_Q1A).passed);
  const auto& b = result(neg, CheckId::SS_Q1B);
  CHECK_FALSE(b.passed);
  REQUIRE(b.evidence.size() == 1);
  CHECK(b.evidence[0].part == Part::main_body);
  CHECK(b.evidence[0].span == "kicked");

  LintConfig quoted = LintConfig::builtin();
  quoted.exempt_quoted_speech = true;
  auto q = lint_text("s", story("Mom says \"you did it.\"", "We clap.", "It is fun."), quoted);
  CHECK(result(q, CheckId::SS_Q1A).passed);
  auto strict = lint_text("s", story("Mom says \"you did it.\"", "We clap.", "It is fun."), LintConfig::builtin());
  CHECK_FALSE(result(strict, CheckId::SS_Q1A).passed);
}

TEST_CASE("tone check exempts third-person explanatory frames") {
  auto blame = lint_text("s", story("I was bad today.", "The room is quiet.", "It ends."), LintConfig::builtin());
  CHECK_FALSE(result(blame, CheckId::SS_Q2).passed);
  auto frame = lint_text("s", story("Some children feel bad when games end.", "The room is quiet.", "It ends."),
                         LintConfig::builtin());
  CHECK(result(frame, CheckId::SS_Q2).passed);
  auto mixed = lint_text("s", story("Some children think I am rude.", "The room is quiet.", "It ends."),
                         LintConfig::builtin());
  CHECK_FALSE(result(mixed, CheckId::SS_Q2).passed);
}

TEST_CASE("idiom and vocabulary checks") {
  auto idiom = lint_text("s", story("Reading is a piece of cake.", "Books are fun.", "I read."), LintConfig::builtin());
  CHECK_FALSE(result(idiom, CheckId::SS_Q3).passed);
  CHECK(result(idiom, CheckId::SS_Q3).evidence[0].rule == "idiom:piece of cake");
  auto vocab = lint_text("s", story("Everyone must wait.", "Lines are long.", "We wait."), LintConfig::builtin());
  CHECK_FALSE(result(vocab, CheckId::SS_Q4).passed);
  CHECK(result(vocab, CheckId::SS_Q4).evidence[0].span == "must");
  CHECK_FALSE(vocab.ss_qualified);
  // Titles are not checked.
  auto title = lint_text("s", story("A.", "B.", "C.", "You Must Share"), LintConfig::builtin());
  CHECK(result(title, CheckId::SS_Q4).passed);
  CHECK(result(title, CheckId::SS_Q1A).passed);
}

TEST_CASE("structural clarity bands and deductions") {
  CHECK(jaccard_band(0.30) == 5);
  CHECK(jaccard_band(0.2999) == 4);
  CHECK(jaccard_band(0.20) == 4);
  CHECK(jaccard_band(0.12) == 3);
  CHECK(jaccard_band(0.05) == 2);
  CHECK(jaccard_band(0.0499) == 1);
  CHECK(content_jaccard("red apple", "red pear") == doctest::Approx(1.0 / 3.0));
  CHECK(content_jaccard("the a", "an of") == 0.0);

  auto scan = scan_story("# Title #: A\n# Main Body #: Pears.\n# Introduction #: Apples.");
  auto sc = score_structure(scan);
  CHECK(sc[0].score == 5 - 1 - 1);  // missing conclusion, one misordered label
  CHECK(sc[2].score == 1);
  auto bad = lint_text("s", "no labels here", LintConfig::builtin());
  CHECK_FALSE(bad.structure_ok);
  CHECK(bad.parse_error.find("MissingPart") != std::string::npos);
  CHECK(bad.result(CheckId::SC_Q1).score == 1);
  CHECK_FALSE(bad.do_qualified);
}

TEST_CASE("compliant seed fixture lints clean") {
  auto c = corpus::load_corpus(testing::fixture("compliant.jsonl"));
  std::vector<QualityReport> reports;
  for (const auto& p : c.pairs()) reports.push_back(lint_story(p));
  auto s = summarize(reports);
  CHECK(s.n == 179);
  CHECK(s.ss_pct == 100.0);
  CHECK(s.do_pct == 100.0);
  CHECK(format_summary_table(s).find("SS") != std::string::npos);
}

TEST_CASE("summary roll-up matches a hand tally") {
  auto good = lint_text("a", story("The sun is out.", "Birds sing.", "We walk home."), LintConfig::builtin());
  auto bad = lint_text("b", story("You must go.", "Birds sing.", "We walk home."), LintConfig::builtin());
  auto s = summarize({good, bad});
  CHECK(s.n == 2);
  CHECK(s.ss_pct == doctest::Approx(50.0));
  CHECK(s.check_pct[static_cast<std::size_t>(CheckId::SS_Q1A)] == doctest::Approx(50.0));
  CHECK(s.check_pct[static_cast<std::size_t>(CheckId::SS_Q4)] == doctest::Approx(50.0));
  CHECK(s.check_pct[static_cast<std::size_t>(CheckId::SS_Q3)] == doctest::Approx(100.0));
  double sc = (good.sc_average + bad.sc_average) / 2.0 / 5.0 * 100.0;
  CHECK(s.sc_pct == doctest::Approx(sc));
}

TEST_CASE("fuzzed stories: deterministic reports, evidence inside its sentence") {
  const std::vector<std::string> bank = {
      "The bus is yellow.", "You can wave.", "I will try to wait.", "I kicked the door.",
      "Some children feel bad.", "I was bad.", "It is raining cats and dogs.", "We must line up.",
      "Mr. Lee smiles at me.", "She says \"you are kind.\"", "My dad will help me count.",
      "Lunch is sort of late!", "Do we go now?", "People can be rude sometimes.", "The bell rings."};
  std::mt19937_64 rng(99);
  const auto& cfg = LintConfig::builtin();
  for (int n = 0; n < 200; ++n) {
    std::array<std::string, 3> parts;
    for (auto& p : parts) {
      int k = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < k; ++i) p += (i ? " " : "") + bank[rng() % bank.size()];
    }
    std::string raw = story(parts[0], parts[1], parts[2]);
    auto r1 = lint_text("f" + std::to_string(n), raw, cfg);
    auto r2 = lint_text("f" + std::to_string(n), raw, cfg);
    REQUIRE(serialize_report(r1) == serialize_report(r2));
    REQUIRE(r1.structure_ok);
    auto st = parse_story(raw, cfg);
    for (const auto& res : r1.results) {
      CHECK((res.passed || !res.evidence.empty()));
      for (const auto& ev : res.evidence) {
        if (ev.sentence_index < 0) continue;
        bool found = false;
        for (const auto& s : st.sentences) {
          if (s.part == ev.part && static_cast<long>(s.index) == ev.sentence_index) {
            found = s.text.find(ev.span) != std::string::npos;
          }
        }
        CAPTURE(raw);
        CHECK(found);
      }
    }
  }
}

TEST_CASE("rubric lists every check") {
  auto j = rubric_json();
  for (auto id : kAllChecks) CHECK(j.find(std::string(to_string(id))) != std::string::npos);
}
