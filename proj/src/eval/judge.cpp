#include <cstdio>
#include <regex>

#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/eval.hpp"
#include "ssbench/parallel.hpp"
#include "ssbench/prompt.hpp"
#include "ssbench/util.hpp"

namespace ssbench::eval {

using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxFeedbackWords = 100;

prompt::PromptKind prompt_kind(Dimension d) {
  switch (d) {
    case Dimension::CH: return prompt::PromptKind::gpt_eval_CH;
    case Dimension::DC: return prompt::PromptKind::gpt_eval_DC;
    case Dimension::EM: return prompt::PromptKind::gpt_eval_EM;
    case Dimension::GA: return prompt::PromptKind::gpt_eval_GA;
    case Dimension::RE: return prompt::PromptKind::gpt_eval_RE;
  }
  throw ValidationError("InvalidDimension", "invalid dimension");
}

std::string strip_markdown(std::string_view line) {
  std::string out;
  for (char c : line) {
    if (c == '*' || c == '_' || c == '`') continue;
    out.push_back(c);
  }
  out = trim(out);
  while (!out.empty() && (out.front() == '#' || out.front() == '>')) out = trim(std::string_view(out).substr(1));
  return out;
}

const std::regex& score_line() {
  // label, optional "(1-5)", optional separator, the digit, optional "/5" or
  // "out of 5", then end of line or a separator that does not start a
  // decimal or a range.
  static const std::regex re(
      R"(^(?:(?:overall score|final score|overall|score|rating|coherence|descriptiveness|discriptiveness|empathy|grammaticality|relevance)(?: score| rating)?\s*(?:\(\s*1\s*-\s*5\s*\))?\s*[:=\-]?\s*)?([1-5])(?:\s*/\s*5|\s+out of 5)?(?:\s*$|\s*[.,;:()\-]\s*(?![0-9])(.*)$))",
      std::regex::icase | std::regex::ECMAScript);
  return re;
}

std::string first_words(std::string_view text, std::size_t n) {
  std::vector<std::string> words;
  for (auto& t : metrics::tokenize(text, metrics::TokenMode::words).tokens) {
    if (words.size() == n) break;
    words.push_back(t);
  }
  return join(words, " ");
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::CH: return "CH";
    case Dimension::DC: return "DC";
    case Dimension::EM: return "EM";
    case Dimension::GA: return "GA";
    case Dimension::RE: return "RE";
  }
  return "?";
}

Dimension dimension_from_string(std::string_view s) {
  for (auto d : kAllDimensions) {
    if (to_string(d) == s) return d;
  }
  throw ValidationError("InvalidDimension", "unknown judge dimension '" + std::string(s) + "' (CH, DC, EM, GA, RE)");
}

std::vector<Dimension> parse_dimensions(std::string_view csv) {
  std::vector<Dimension> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string item = trim(csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(dimension_from_string(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ValidationError("InvalidDimension", "no dimensions given");
  return out;
}

std::string judge_request(const corpus::StoryPair& pair, Dimension dimension) {
  prompt::PromptContext ctx;
  ctx.pair = pair;
  return prompt::render(prompt_kind(dimension), ctx);
}

JudgeScore parse_judge_response(std::string_view raw, Dimension dimension) {
  auto lines = split_lines(raw);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ValidationError("UnparseableScore", "UnparseableScore(empty response)");
  std::string first = strip_markdown(lines[i]);
  std::smatch m;
  if (!std::regex_match(first, m, score_line())) {
    throw ValidationError("UnparseableScore", "UnparseableScore(\"" + first_words(lines[i], 12) + "\")");
  }
  JudgeScore s;
  s.dimension = dimension;
  s.score = std::stoi(m[1]);
  s.evidence = trim(lines[i]);
  std::string feedback = m[2].matched ? std::string(m[2]) : "";
  for (std::size_t k = i + 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    if (!trim(feedback).empty()) feedback += " ";
    feedback += trim(lines[k]);
  }
  s.feedback = first_words(strip_markdown(feedback), kMaxFeedbackWords);
  return s;
}

std::vector<JudgeRecord> judge_pairs(const std::vector<corpus::StoryPair>& pairs,
                                     const std::vector<Dimension>& dimensions, llm::Backend& backend,
                                     std::size_t jobs) {
  std::vector<JudgeRecord> records;
  for (const auto& p : pairs) {
    for (auto d : dimensions) records.push_back({p.id, d, judge_request(p, d), "", std::nullopt, ""});
  }
  const auto& params = llm::preset(llm::Stage::evaluate_models);
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    auto& r = records[i];
    try {
      r.response = backend.complete(llm::Stage::evaluate_models, r.request, params).text;
      r.score = parse_judge_response(r.response, r.dimension);
    } catch (const Error& e) {
      r.error = e.code() + ": " + e.what();
    }
  });
  return records;
}

std::string serialize_transcripts(const std::vector<JudgeRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["pair_id"] = r.pair_id;
    j["dimension"] = to_string(r.dimension);
    j["request"] = r.request;
    j["response"] = r.response;
    if (r.score) {
      j["score"] = r.score->score;
      j["feedback"] = r.score->feedback;
      j["evidence"] = r.score->evidence;
    } else {
      j["score"] = nullptr;
      j["error"] = r.error;
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<JudgeSummaryRow> summarize_judgements(const std::vector<JudgeRecord>& records) {
  std::vector<JudgeSummaryRow> rows;
  for (auto d : kAllDimensions) {
    JudgeSummaryRow row{d, 0, 0, 0.0};
    bool seen = false;
    for (const auto& r : records) {
      if (r.dimension != d) continue;
      seen = true;
      if (r.score) {
        ++row.scored;
        row.mean += r.score->score;
      } else {
        ++row.errors;
      }
    }
    if (!seen) continue;
    if (row.scored > 0) row.mean /= static_cast<double>(row.scored);
    rows.push_back(row);
  }
  return rows;
}

std::string serialize_judge_summary(const std::vector<JudgeSummaryRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"dimension", to_string(r.dimension)}, {"scored", r.scored}, {"errors", r.errors}, {"mean", r.mean}});
  }
  return ordered_json{{"dimensions", arr}}.dump(2) + "\n";
}

std::string format_judge_summary(const std::vector<JudgeSummaryRow>& rows) {
  char line[96];
  std::snprintf(line, sizeof line, "%-4s %7s %7s %6s\n", "dim", "scored", "errors", "mean");
  std::string out = line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-4s %7zu %7zu %6.2f\n", std::string(to_string(r.dimension)).c_str(), r.scored,
                  r.errors, r.mean);
    out += line;
  }
  return out;
}

}  // namespace ssbench::eval
