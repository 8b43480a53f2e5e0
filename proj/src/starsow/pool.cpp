#include <algorithm>
#include <cstdio>
#include <regex>

#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/starsow.hpp"
#include "ssbench/util.hpp"

namespace ssbench::starsow {

using nlohmann::ordered_json;

namespace {

metrics::TokenSequence key_tokens(std::string_view text) {
  return metrics::tokenize(text, metrics::TokenMode::lowercase_words);
}

GardenDecision dedup(const metrics::TokenSequence& candidate, const std::vector<metrics::TokenSequence>& pool,
                     double threshold) {
  GardenDecision d;
  if (pool.empty()) return d;
  auto nearest = metrics::nearest_seed_similarity(candidate, pool);
  d.score = nearest.score;
  d.nearest = nearest.index;
  if (!(nearest.score < threshold)) {
    d.accepted = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, "dedup \xE2\x89\xA5 %g", threshold);
    d.reasons.push_back(buf);
  }
  return d;
}

std::string strip_decoration(std::string_view s) {
  std::string t = trim(s);
  auto is_deco = [](char c) { return c == '*' || c == '"' || c == '\'' || c == '[' || c == ']' || c == '#' || c == '`'; };
  std::size_t b = 0, e = t.size();
  while (b < e && (is_deco(t[b]) || t[b] == ' ')) ++b;
  while (e > b && (is_deco(t[e - 1]) || t[e - 1] == ' ')) --e;
  return t.substr(b, e - b);
}

const std::regex& numbered_line() {
  static const std::regex re(R"(^\s*\d+\s*[.)]\s*(.*)$)");
  return re;
}

std::vector<std::string> nonblank_lines(std::string_view cue, std::string_view completion) {
  std::string text(cue);
  text.append(completion);
  std::vector<std::string> out;
  for (auto& line : split_lines(text)) {
    if (!trim(line).empty()) out.push_back(trim(line));
  }
  return out;
}

}  // namespace

std::size_t GrowthPool::n_generated_chapters() const {
  std::size_t n = 0;
  for (const auto& c : chapters) n += c.origin == corpus::Origin::generated;
  return n;
}

const corpus::ChapterNode* GrowthPool::find_chapter(std::string_view id) const {
  for (const auto& c : chapters) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void GrowthPool::add_chapter(corpus::ChapterNode node) {
  chapter_tokens_.push_back(key_tokens(node.name));
  titles_by_chapter.try_emplace(node.id);
  chapters.push_back(std::move(node));
}

void GrowthPool::add_title(const std::string& chapter_id, const std::string& title, bool generated) {
  titles_.push_back({chapter_id, title, generated, key_tokens(title)});
  titles_by_chapter[chapter_id].push_back(title);
  if (generated) generated_titles.push_back({chapter_id, title});
}

std::vector<metrics::TokenSequence> GrowthPool::title_tokens(std::string_view chapter_id, TitleScope scope) const {
  std::vector<metrics::TokenSequence> out;
  for (const auto& t : titles_) {
    if (scope == TitleScope::global || t.chapter_id == chapter_id) out.push_back(t.tokens);
  }
  return out;
}

std::vector<std::string> GrowthPool::title_texts(std::string_view chapter_id, TitleScope scope) const {
  std::vector<std::string> out;
  for (const auto& t : titles_) {
    if (scope == TitleScope::global || t.chapter_id == chapter_id) out.push_back(t.text);
  }
  return out;
}

GardenDecision garden_accept_chapter(const metrics::TokenSequence& candidate,
                                     const std::vector<metrics::TokenSequence>& pool, double threshold) {
  return dedup(candidate, pool, threshold);
}

GardenDecision garden_accept_title(const metrics::TokenSequence& candidate,
                                   const std::vector<metrics::TokenSequence>& pool, double threshold) {
  return dedup(candidate, pool, threshold);
}

GardenDecision garden_accept_story(const corpus::StoryContent& content, std::size_t max_words,
                                   const lint::LintConfig& config) {
  corpus::StoryPair pair;
  pair.content = content;
  auto st = lint::structure_from_pair(pair, config);

  GardenDecision d;
  if (!lint::check_perspective(st, config).first.passed) d.reasons.push_back("second-person");
  if (!lint::check_vocabulary(st, config).passed) d.reasons.push_back("vocabulary");
  if (!lint::check_tone(st, config).passed) d.reasons.push_back("tone");
  std::size_t words = metrics::word_count(content.introduction) + metrics::word_count(content.main_body) +
                      metrics::word_count(content.conclusion);
  if (words > max_words) d.reasons.push_back("length");
  if (trim(content.introduction).empty() || trim(content.main_body).empty() || trim(content.conclusion).empty()) {
    d.reasons.push_back("missing-part");
  }
  d.accepted = d.reasons.empty();
  return d;
}

std::vector<ParsedLine> parse_chapter_lines(std::string_view completion, std::string_view cue) {
  std::vector<ParsedLine> out;
  for (const auto& line : nonblank_lines(cue, completion)) {
    ParsedLine p;
    p.raw = line;
    std::smatch m;
    if (std::regex_match(line, m, numbered_line())) {
      std::string rest = m[1];
      auto colon = rest.find(':');
      if (colon != std::string::npos) {
        p.name = strip_decoration(rest.substr(0, colon));
        p.explanation = strip_decoration(rest.substr(colon + 1));
        p.ok = !p.name.empty() && !p.explanation.empty() && !key_tokens(p.name).tokens.empty();
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ParsedLine> parse_title_lines(std::string_view completion, std::string_view cue) {
  std::vector<ParsedLine> out;
  for (const auto& line : nonblank_lines(cue, completion)) {
    ParsedLine p;
    p.raw = line;
    std::smatch m;
    if (std::regex_match(line, m, numbered_line())) {
      p.name = strip_decoration(std::string(m[1]));
      p.ok = !p.name.empty() && !key_tokens(p.name).tokens.empty();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string story_raw_text(std::string_view title, std::string_view completion) {
  std::string raw = "1. # Title #:\n";
  raw.append(title).append("\n2. ").append(completion);
  return raw;
}

AuditReport audit_pool(const GrowthPool& pool, const PipelineConfig& config) {
  AuditReport report;
  GrowthPool replay;
  for (const auto& c : pool.chapters) {
    if (c.origin == corpus::Origin::seed) replay.add_chapter(c);
  }
  for (const auto& t : pool.pooled_titles()) {
    if (!t.generated) replay.add_title(t.chapter_id, t.text, false);
  }

  std::size_t next_chapter = 0;
  std::vector<const corpus::ChapterNode*> generated;
  for (const auto& c : pool.chapters) {
    if (c.origin == corpus::Origin::generated) generated.push_back(&c);
  }

  for (const auto& e : pool.log) {
    if (!e.accepted) continue;
    if (e.stage == "expand_chapters") {
      ++report.chapters_checked;
      auto d = garden_accept_chapter(key_tokens(e.candidate), replay.chapter_tokens(), config.dedup_threshold);
      if (!d.accepted) report.violations.push_back("chapter '" + e.candidate + "' breaks dedup");
      if (next_chapter >= generated.size() || generated[next_chapter]->name != e.candidate) {
        report.violations.push_back("chapter '" + e.candidate + "' logged but not pooled in order");
        continue;
      }
      replay.add_chapter(*generated[next_chapter++]);
    } else if (e.stage == "generate_titles") {
      ++report.titles_checked;
      auto d = garden_accept_title(key_tokens(e.candidate), replay.title_tokens(e.chapter_id, config.title_scope),
                                   config.dedup_threshold);
      if (!d.accepted) report.violations.push_back("title '" + e.candidate + "' breaks dedup");
      replay.add_title(e.chapter_id, e.candidate, true);
    }
  }
  if (next_chapter != generated.size()) report.violations.push_back("pooled chapters missing from the log");
  if (replay.generated_titles != pool.generated_titles) {
    report.violations.push_back("pooled titles do not match the acceptance log");
  }

  for (const auto& s : pool.stories) {
    ++report.stories_checked;
    auto d = garden_accept_story(s.content, config.max_story_words);
    if (!d.accepted) report.violations.push_back("story " + s.id + " fails: " + join(d.reasons, ","));
  }
  return report;
}

std::string serialize_pool(const GrowthPool& pool, std::uint64_t rng_seed) {
  std::string out;
  auto emit = [&](const ordered_json& j) { out += j.dump() + "\n"; };
  emit({{"kind", "checkpoint"}, {"version", kCheckpointVersion}, {"rng_seed", rng_seed},
        {"completed_stage", pool.completed_stage}});
  for (const auto& c : pool.chapters) {
    emit({{"kind", "chapter"}, {"id", c.id}, {"name", c.name}, {"explanation", c.explanation},
          {"origin", corpus::to_string(c.origin)}});
  }
  for (const auto& t : pool.pooled_titles()) {
    emit({{"kind", "title"}, {"chapter_id", t.chapter_id}, {"title", t.text}, {"generated", t.generated}});
  }
  for (const auto& p : pool.stories) {
    emit({{"kind", "story"}, {"id", p.id}, {"chapter_id", p.chapter_id}, {"title", p.title},
          {"introduction", p.content.introduction}, {"main_body", p.content.main_body},
          {"conclusion", p.content.conclusion}});
  }
  for (const auto& e : pool.log) {
    emit({{"kind", "log"}, {"stage", e.stage}, {"chapter_id", e.chapter_id}, {"candidate", e.candidate},
          {"accepted", e.accepted}, {"reason", e.reason}, {"score", e.score}, {"nearest", e.nearest}});
  }
  return out;
}

GrowthPool parse_pool(std::string_view text, std::optional<std::uint64_t> expected_seed) {
  GrowthPool pool;
  bool header = false;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& why) -> void {
      throw ValidationError("MalformedCheckpoint", "checkpoint line " + std::to_string(line_no) + ": " + why);
    };
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("not a JSON object");
    try {
      std::string kind = j.at("kind").get<std::string>();
      if (!header) {
        if (kind != "checkpoint") fail("missing header");
        if (j.at("version").get<int>() != kCheckpointVersion) {
          throw ValidationError("CheckpointVersion", "checkpoint format version " +
                                                         std::to_string(j.at("version").get<int>()) + " unsupported");
        }
        auto seed = j.at("rng_seed").get<std::uint64_t>();
        if (expected_seed && seed != *expected_seed) {
          throw ValidationError("CheckpointMismatch", "checkpoint was written with seed " + std::to_string(seed) +
                                                          ", run uses " + std::to_string(*expected_seed));
        }
        pool.completed_stage = j.at("completed_stage").get<int>();
        header = true;
      } else if (kind == "chapter") {
        pool.add_chapter({j.at("id").get<std::string>(), j.at("name").get<std::string>(),
                          j.at("explanation").get<std::string>(),
                          corpus::origin_from_string(j.at("origin").get<std::string>())});
      } else if (kind == "title") {
        pool.add_title(j.at("chapter_id").get<std::string>(), j.at("title").get<std::string>(),
                       j.at("generated").get<bool>());
      } else if (kind == "story") {
        corpus::StoryPair p;
        p.id = j.at("id").get<std::string>();
        p.chapter_id = j.at("chapter_id").get<std::string>();
        p.title = j.at("title").get<std::string>();
        p.content = {j.at("introduction").get<std::string>(), j.at("main_body").get<std::string>(),
                     j.at("conclusion").get<std::string>()};
        p.origin = corpus::Origin::generated;
        pool.stories.push_back(std::move(p));
      } else if (kind == "log") {
        pool.log.push_back({j.at("stage").get<std::string>(), j.at("chapter_id").get<std::string>(),
                            j.at("candidate").get<std::string>(), j.at("accepted").get<bool>(),
                            j.at("reason").get<std::string>(), j.at("score").get<double>(),
                            j.at("nearest").get<std::string>()});
      } else {
        fail("unknown kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
  }
  if (!header) throw ValidationError("MalformedCheckpoint", "empty checkpoint");
  return pool;
}

}  // namespace ssbench::starsow
