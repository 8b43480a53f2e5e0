#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ssbench/lint.hpp"
#include "ssbench/util.hpp"

namespace ssbench::lint {

std::string_view to_string(CheckId id) {
  switch (id) {
    case CheckId::SC_Q1: return "SC_Q1";
    case CheckId::SC_Q2: return "SC_Q2";
    case CheckId::SC_Q3: return "SC_Q3";
    case CheckId::SC_Q4: return "SC_Q4";
    case CheckId::DO_Q1: return "DO_Q1";
    case CheckId::SS_Q1A: return "SS_Q1A";
    case CheckId::SS_Q1B: return "SS_Q1B";
    case CheckId::SS_Q2: return "SS_Q2";
    case CheckId::SS_Q3: return "SS_Q3";
    case CheckId::SS_Q4: return "SS_Q4";
  }
  return "?";
}

bool is_scored(CheckId id) {
  return id == CheckId::SC_Q1 || id == CheckId::SC_Q2 || id == CheckId::SC_Q3 || id == CheckId::SC_Q4;
}

namespace {

const std::set<std::string, std::less<>> kSecondPerson = {"you", "your", "yours", "yourself", "yourselves"};
const std::set<std::string, std::less<>> kFirstPersonSubject = {"i", "my", "me", "we"};
const std::set<std::string, std::less<>> kPersonalPronouns = {
    "i",   "i'm",    "i'll",    "i've",  "i'd",  "me",   "my",    "mine",     "myself",     "we",     "we're",
    "we'll", "we've", "us",     "our",   "ours", "ourselves", "you", "you're", "you'll", "you've", "your",
    "yours", "yourself", "yourselves"};

// Byte ranges enclosed in straight or typographic double quotes.
std::vector<std::pair<std::size_t, std::size_t>> quoted_ranges(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t width = 0;
    bool is_open = false, is_close = false;
    if (s[i] == '"') {
      width = 1;
      is_open = !open;
      is_close = open.has_value();
    } else if (i + 3 <= s.size() && s.compare(i, 3, "\xE2\x80\x9C") == 0) {
      width = 3;
      is_open = true;
    } else if (i + 3 <= s.size() && s.compare(i, 3, "\xE2\x80\x9D") == 0) {
      width = 3;
      is_close = true;
    }
    if (width == 0) continue;
    if (is_open && !open) {
      open = i;
    } else if (is_close && open) {
      out.emplace_back(*open, i + width);
      open.reset();
    }
    i += width - 1;
  }
  return out;
}

std::vector<metrics::TokenSpan> sentence_tokens(const Sentence& s, bool drop_quoted) {
  auto tokens = metrics::tokenize_with_offsets(s.text);
  if (!drop_quoted) return tokens;
  const auto ranges = quoted_ranges(s.text);
  std::erase_if(tokens, [&](const metrics::TokenSpan& t) {
    return std::any_of(ranges.begin(), ranges.end(),
                       [&](const auto& r) { return t.begin >= r.first && t.end <= r.second; });
  });
  return tokens;
}

Evidence evidence_for(const Sentence& s, std::size_t begin, std::size_t end, std::string rule) {
  return {s.part, static_cast<long>(s.index), s.text.substr(begin, end - begin), std::move(rule)};
}

// Existential lexicon check: fails on any phrase hit in any sentence.
CheckResult lexicon_check(CheckId id, const StoryStructure& st, const Lexicon& lexicon, std::string_view rule_prefix) {
  CheckResult r{id, 0, true, {}};
  for (const auto& s : st.sentences) {
    const auto tokens = metrics::tokenize_with_offsets(s.text);
    for (const auto& m : find_phrases(tokens, lexicon)) {
      r.evidence.push_back(evidence_for(s, tokens[m.first_token].begin, tokens[m.last_token].end,
                                        std::string(rule_prefix) + ":" + phrase_text(lexicon, m.phrase)));
    }
  }
  r.passed = r.evidence.empty();
  return r;
}

}  // namespace

DescriptiveCounts count_sentence_kinds(const StoryStructure& st) {
  DescriptiveCounts c;
  for (const auto& s : st.sentences) {
    (s.kind == SentenceKind::coaching ? c.coaching : c.descriptive) += 1;
  }
  if (c.coaching == 0) {
    c.ratio = c.descriptive > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    c.ratio = static_cast<double>(c.descriptive) / static_cast<double>(c.coaching);
  }
  return c;
}

CheckResult check_descriptive_orientation(const StoryStructure& st) {
  const DescriptiveCounts c = count_sentence_kinds(st);
  CheckResult r{CheckId::DO_Q1, 0, true, {}};
  // descriptive / coaching >= 2, evaluated without division.
  r.passed = c.descriptive >= 1 && c.descriptive >= 2 * c.coaching;
  for (const auto& s : st.sentences) {
    if (s.kind == SentenceKind::coaching) {
      r.evidence.push_back({s.part, static_cast<long>(s.index), s.text, "coaching:" + s.coaching_rule});
    }
  }
  if (!r.passed && r.evidence.empty()) {
    r.evidence.push_back({Part::introduction, -1, "", "no-descriptive-sentences"});
  }
  return r;
}

std::pair<CheckResult, CheckResult> check_perspective(const StoryStructure& st, const LintConfig& config) {
  CheckResult a{CheckId::SS_Q1A, 0, true, {}};
  CheckResult b{CheckId::SS_Q1B, 0, true, {}};
  for (const auto& s : st.sentences) {
    const auto tokens = sentence_tokens(s, config.exempt_quoted_speech);
    bool first_person = false;
    for (const auto& t : tokens) {
      if (kSecondPerson.contains(t.token)) a.evidence.push_back(evidence_for(s, t.begin, t.end, "second-person"));
      if (kFirstPersonSubject.contains(t.token)) first_person = true;
    }
    if (!first_person) continue;
    for (const auto& m : find_phrases(tokens, config.negative_behavior)) {
      b.evidence.push_back(evidence_for(s, tokens[m.first_token].begin, tokens[m.last_token].end,
                                        "first-person-negative-behavior:" + phrase_text(config.negative_behavior, m.phrase)));
    }
  }
  a.passed = a.evidence.empty();
  b.passed = b.evidence.empty();
  return {a, b};
}

CheckResult check_tone(const StoryStructure& st, const LintConfig& config) {
  CheckResult r{CheckId::SS_Q2, 0, true, {}};
  for (const auto& s : st.sentences) {
    const auto tokens = metrics::tokenize_with_offsets(s.text);
    const auto hits = find_phrases(tokens, config.tone);
    if (hits.empty()) continue;
    const bool personal = std::any_of(tokens.begin(), tokens.end(),
                                      [](const auto& t) { return kPersonalPronouns.contains(t.token); });
    const bool third_person_frame = !personal && !find_phrases(tokens, config.tone_frames).empty();
    if (third_person_frame) continue;
    for (const auto& m : hits) {
      r.evidence.push_back(evidence_for(s, tokens[m.first_token].begin, tokens[m.last_token].end,
                                        "negative-tone:" + phrase_text(config.tone, m.phrase)));
    }
  }
  r.passed = r.evidence.empty();
  return r;
}

CheckResult check_accuracy(const StoryStructure& st, const LintConfig& config) {
  return lexicon_check(CheckId::SS_Q3, st, config.idioms, "idiom");
}

CheckResult check_vocabulary(const StoryStructure& st, const LintConfig& config) {
  return lexicon_check(CheckId::SS_Q4, st, config.vocabulary, "vocabulary");
}

double content_jaccard(std::string_view a, std::string_view b, const LintConfig& config) {
  auto content_words = [&](std::string_view text) {
    std::set<std::string> words;
    for (auto& t : metrics::tokenize(text, metrics::TokenMode::lowercase_words).tokens) {
      if (!config.stopwords.contains(t)) words.insert(std::move(t));
    }
    return words;
  };
  const auto wa = content_words(a);
  const auto wb = content_words(b);
  std::size_t inter = 0;
  for (const auto& w : wa) inter += wb.contains(w) ? 1 : 0;
  const std::size_t uni = wa.size() + wb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int jaccard_band(double j) {
  if (j >= 0.30) return 5;
  if (j >= 0.20) return 4;
  if (j >= 0.12) return 3;
  if (j >= 0.05) return 2;
  return 1;
}

std::array<CheckResult, 4> score_structure(const StoryScan& scan, const LintConfig& config) {
  std::array<CheckResult, 4> out{CheckResult{CheckId::SC_Q1, 5, true, {}}, CheckResult{CheckId::SC_Q2, 1, true, {}},
                                 CheckResult{CheckId::SC_Q3, 1, true, {}}, CheckResult{CheckId::SC_Q4, 1, true, {}}};
  auto usable = [&](Part p) {
    const auto& slot = scan.at(p);
    return slot.present && !segment_sentences(slot.text).empty();
  };

  int deductions = 0;
  for (Part p : {Part::title, Part::introduction, Part::main_body, Part::conclusion}) {
    const auto& slot = scan.at(p);
    if (!slot.present) {
      ++deductions;
      out[0].evidence.push_back({p, -1, "", "missing-part"});
    } else if (!usable(p)) {
      ++deductions;
      out[0].evidence.push_back({p, -1, "", "empty-part"});
    }
  }
  if (scan.misordered > 0) {
    deductions += static_cast<int>(scan.misordered);
    out[0].evidence.push_back({Part::title, -1, "", "misordered:" + std::to_string(scan.misordered)});
  }
  out[0].score = std::max(1, 5 - deductions);

  const std::array<std::pair<Part, Part>, 3> pairs = {std::pair{Part::introduction, Part::main_body},
                                                      std::pair{Part::main_body, Part::conclusion},
                                                      std::pair{Part::conclusion, Part::introduction}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto& r = out[k + 1];
    const auto [p, q] = pairs[k];
    if (!usable(p) || !usable(q)) {
      r.score = 1;
      r.evidence.push_back({usable(p) ? q : p, -1, "", "missing-part"});
      continue;
    }
    const double j = content_jaccard(scan.at(p).text, scan.at(q).text, config);
    r.score = jaccard_band(j);
  }
  return out;
}

std::array<CheckResult, 4> score_structure(const StoryStructure& st, const LintConfig& config) {
  StoryScan scan;
  const std::array<std::string, 4> texts = {st.title, st.parts.introduction, st.parts.main_body, st.parts.conclusion};
  for (std::size_t i = 0; i < 4; ++i) {
    scan.parts[i].present = !trim(texts[i]).empty();
    scan.parts[i].position = i;
    scan.parts[i].text = texts[i];
  }
  return score_structure(scan, config);
}

}  // namespace ssbench::lint
