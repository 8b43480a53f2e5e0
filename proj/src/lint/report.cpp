#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/util.hpp"

namespace ssbench::lint {

using ordered_json = nlohmann::ordered_json;

namespace {

QualityReport assemble(std::string_view story_id, const StoryStructure& st, const std::array<CheckResult, 4>& sc,
                       const LintConfig& config) {
  QualityReport rep;
  rep.story_id = std::string(story_id);
  rep.results.reserve(kAllChecks.size());
  for (const auto& r : sc) rep.results.push_back(r);
  rep.results.push_back(check_descriptive_orientation(st));
  auto [q1a, q1b] = check_perspective(st, config);
  rep.results.push_back(std::move(q1a));
  rep.results.push_back(std::move(q1b));
  rep.results.push_back(check_tone(st, config));
  rep.results.push_back(check_accuracy(st, config));
  rep.results.push_back(check_vocabulary(st, config));

  rep.sc_average = (sc[0].score + sc[1].score + sc[2].score + sc[3].score) / 4.0;
  rep.do_qualified = rep.result(CheckId::DO_Q1).passed;
  rep.ss_qualified = rep.result(CheckId::SS_Q1A).passed && rep.result(CheckId::SS_Q1B).passed &&
                     rep.result(CheckId::SS_Q2).passed && rep.result(CheckId::SS_Q3).passed &&
                     rep.result(CheckId::SS_Q4).passed;
  rep.word_count = metrics::word_count(st.parts.introduction) + metrics::word_count(st.parts.main_body) +
                   metrics::word_count(st.parts.conclusion);
  const DescriptiveCounts counts = count_sentence_kinds(st);
  rep.n_descriptive = counts.descriptive;
  rep.n_coaching = counts.coaching;
  rep.ratio_descriptive_coaching = counts.ratio;
  return rep;
}

}  // namespace

QualityReport lint_story(const corpus::StoryPair& pair, const LintConfig& config) {
  const StoryStructure st = structure_from_pair(pair, config);
  QualityReport rep = assemble(pair.id, st, score_structure(st, config), config);
  rep.structure_ok = !trim(pair.title).empty() && !trim(pair.content.introduction).empty() &&
                     !trim(pair.content.main_body).empty() && !trim(pair.content.conclusion).empty();
  if (!rep.structure_ok) rep.parse_error = "MissingPart";
  return rep;
}

QualityReport lint_text(std::string_view story_id, std::string_view raw, const LintConfig& config) {
  const StoryScan scan = scan_story(raw);
  StoryStructure st;
  std::string error;
  try {
    st = parse_story(raw, config);
  } catch (const ValidationError& e) {
    error = e.what();
    // Keep linting whatever parts were found.
    corpus::StoryContent partial{scan.at(Part::introduction).text, scan.at(Part::main_body).text,
                                 scan.at(Part::conclusion).text};
    corpus::StoryPair shim{"", "", scan.at(Part::title).text, partial, corpus::Origin::generated};
    st = structure_from_pair(shim, config);
    st.raw = std::string(raw);
  }
  QualityReport rep = assemble(story_id, st, score_structure(scan, config), config);
  rep.structure_ok = error.empty();
  rep.parse_error = error;
  return rep;
}

std::string serialize_report(const QualityReport& r) {
  ordered_json results = ordered_json::array();
  for (const auto& c : r.results) {
    ordered_json item;
    item["check"] = to_string(c.id);
    if (is_scored(c.id)) {
      item["score"] = c.score;
    } else {
      item["pass"] = c.passed;
    }
    ordered_json ev = ordered_json::array();
    for (const auto& e : c.evidence) {
      ev.push_back(ordered_json{{"part", to_string(e.part)},
                                {"sentence_index", e.sentence_index},
                                {"span", e.span},
                                {"rule", e.rule}});
    }
    item["evidence"] = std::move(ev);
    results.push_back(std::move(item));
  }
  ordered_json j;
  j["story_id"] = r.story_id;
  j["structure_ok"] = r.structure_ok;
  j["parse_error"] = r.parse_error.empty() ? ordered_json(nullptr) : ordered_json(r.parse_error);
  j["word_count"] = r.word_count;
  j["n_descriptive"] = r.n_descriptive;
  j["n_coaching"] = r.n_coaching;
  j["ratio_descriptive_coaching"] =
      std::isinf(r.ratio_descriptive_coaching) ? ordered_json("inf") : ordered_json(r.ratio_descriptive_coaching);
  j["sc_average"] = r.sc_average;
  j["do_qualified"] = r.do_qualified;
  j["ss_qualified"] = r.ss_qualified;
  j["results"] = std::move(results);
  return j.dump();
}

LintSummary summarize(const std::vector<QualityReport>& reports) {
  LintSummary s;
  s.n = reports.size();
  if (reports.empty()) return s;
  double sc = 0, dq = 0, sq = 0;
  std::array<double, 10> per{};
  for (const auto& r : reports) {
    sc += r.sc_average;
    dq += r.do_qualified ? 1 : 0;
    sq += r.ss_qualified ? 1 : 0;
    for (std::size_t i = 0; i < kAllChecks.size(); ++i) {
      const auto& c = r.results[i];
      per[i] += is_scored(c.id) ? c.score / 5.0 : (c.passed ? 1.0 : 0.0);
    }
  }
  const auto n = static_cast<double>(reports.size());
  s.sc_pct = sc / n / 5.0 * 100.0;
  s.do_pct = dq / n * 100.0;
  s.ss_pct = sq / n * 100.0;
  for (std::size_t i = 0; i < per.size(); ++i) s.check_pct[i] = per[i] / n * 100.0;
  return s;
}

std::string serialize_summary(const LintSummary& s) {
  ordered_json checks;
  for (std::size_t i = 0; i < kAllChecks.size(); ++i) checks[std::string(to_string(kAllChecks[i]))] = s.check_pct[i];
  ordered_json j{{"n", s.n}, {"sc_pct", s.sc_pct}, {"do_pct", s.do_pct}, {"ss_pct", s.ss_pct}, {"checks", checks}};
  return j.dump(2) + "\n";
}

std::string format_summary_table(const LintSummary& s) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %8s\n", "metric", "percent");
  out << line;
  std::snprintf(line, sizeof line, "%-8s %8.2f\n", "SC.", s.sc_pct);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %8.2f\n", "DO.", s.do_pct);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %8.2f\n", "SS.", s.ss_pct);
  out << line;
  for (std::size_t i = 0; i < kAllChecks.size(); ++i) {
    std::snprintf(line, sizeof line, "%-8s %8.2f\n", std::string(to_string(kAllChecks[i])).c_str(), s.check_pct[i]);
    out << line;
  }
  out << "stories  " << s.n << "\n";
  return out.str();
}

std::string rubric_json() {
  struct Row {
    CheckId id;
    const char* category;
    const char* question;
  };
  static const Row rows[] = {
      {CheckId::SC_Q1, "Structural Clarity", "Does the Social Story have a clear structure?"},
      {CheckId::SC_Q2, "Structural Clarity", "Do the introduction and the main body show correlation with each other?"},
      {CheckId::SC_Q3, "Structural Clarity", "Do the main body and the conclusion show a correlation with each other?"},
      {CheckId::SC_Q4, "Structural Clarity", "Do the conclusion and the introduction show a correlation with each other?"},
      {CheckId::DO_Q1, "Descriptive Orientation", "Does the Social Story describe more than direct?"},
      {CheckId::SS_Q1A, "Situational Safety", "Does the Social Story avoid the second-person perspective?"},
      {CheckId::SS_Q1B, "Situational Safety",
       "Does the Social Story avoid the first-person perspective when describing negative behaviors?"},
      {CheckId::SS_Q2, "Situational Safety", "Does the Social Story consistently convey a positive and patient tone?"},
      {CheckId::SS_Q3, "Situational Safety", "Does the Social Story express accurately?"},
      {CheckId::SS_Q4, "Situational Safety", "Does the Social Story use exact vocabulary?"},
  };
  ordered_json items = ordered_json::array();
  for (const auto& row : rows) {
    items.push_back(ordered_json{{"check", to_string(row.id)},
                                 {"field", to_lower_ascii(to_string(row.id))},
                                 {"category", row.category},
                                 {"question", row.question},
                                 {"answer", is_scored(row.id) ? "scale_1_5" : "yes_no"}});
  }
  return ordered_json{{"version", 1}, {"checks", items}}.dump(2) + "\n";
}

}  // namespace ssbench::lint
