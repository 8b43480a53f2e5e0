#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ssbench/corpus.hpp"
#include "ssbench/error.hpp"
#include "ssbench/util.hpp"

namespace ssbench::corpus {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Origin o) { return o == Origin::seed ? "seed" : "generated"; }

Origin origin_from_string(std::string_view s) {
  if (s == "seed") return Origin::seed;
  if (s == "generated") return Origin::generated;
  throw ValidationError("MalformedRecord", "origin must be \"seed\" or \"generated\", got \"" + std::string(s) + "\"");
}

std::string StoryContent::joined() const { return introduction + "\n" + main_body + "\n" + conclusion; }

Corpus::Corpus(std::vector<ChapterNode> chapters, std::vector<StoryPair> pairs)
    : chapters_(std::move(chapters)), pairs_(std::move(pairs)) {
  reindex();
}

void Corpus::reindex() {
  chapter_index_.clear();
  pair_index_.clear();
  for (std::size_t i = 0; i < chapters_.size(); ++i) chapter_index_.emplace(chapters_[i].id, i);
  for (std::size_t i = 0; i < pairs_.size(); ++i) pair_index_.emplace(pairs_[i].id, i);
}

const ChapterNode* Corpus::find_chapter(std::string_view id) const {
  auto it = chapter_index_.find(std::string(id));
  return it == chapter_index_.end() ? nullptr : &chapters_[it->second];
}

const StoryPair* Corpus::find_pair(std::string_view id) const {
  auto it = pair_index_.find(std::string(id));
  return it == pair_index_.end() ? nullptr : &pairs_[it->second];
}

std::vector<const StoryPair*> Corpus::pairs_in_chapter(std::string_view chapter_id) const {
  std::vector<const StoryPair*> out;
  for (const auto& p : pairs_) {
    if (p.chapter_id == chapter_id) out.push_back(&p);
  }
  return out;
}

void Corpus::validate() const {
  std::set<std::string> names;
  std::set<std::string> chapter_ids;
  for (const auto& c : chapters_) {
    if (c.id.empty()) throw ValidationError("InvariantViolation", "chapter with empty id");
    if (!chapter_ids.insert(c.id).second) throw ValidationError("InvariantViolation", "duplicate chapter id '" + c.id + "'");
    if (trim(c.name).empty()) throw ValidationError("InvariantViolation", "chapter '" + c.id + "' has an empty name");
    if (c.origin == Origin::generated && trim(c.explanation).empty()) {
      throw ValidationError("InvariantViolation", "generated chapter '" + c.id + "' has an empty explanation");
    }
    if (!names.insert(normalize_key(c.name)).second) {
      throw ValidationError("InvariantViolation", "duplicate chapter name '" + c.name + "'");
    }
  }
  std::set<std::string> pair_ids;
  std::set<std::pair<std::string, std::string>> titles;
  for (const auto& p : pairs_) {
    if (p.id.empty()) throw ValidationError("InvariantViolation", "pair with empty id");
    if (!pair_ids.insert(p.id).second) throw ValidationError("InvariantViolation", "duplicate pair id '" + p.id + "'");
    if (!chapter_ids.contains(p.chapter_id)) {
      throw ValidationError("ReferentialIntegrity",
                            "pair '" + p.id + "' references unknown chapter_id '" + p.chapter_id + "'");
    }
    if (trim(p.title).empty()) throw ValidationError("InvariantViolation", "pair '" + p.id + "' has an empty title");
    if (trim(p.content.introduction).empty() || trim(p.content.main_body).empty() ||
        trim(p.content.conclusion).empty()) {
      throw ValidationError("InvariantViolation", "pair '" + p.id + "' has an empty story part");
    }
    if (!titles.emplace(p.chapter_id, normalize_key(p.title)).second) {
      throw ValidationError("InvariantViolation",
                            "duplicate title '" + p.title + "' in chapter '" + p.chapter_id + "'");
    }
  }
}

namespace {

std::string require_string(const nlohmann::json& rec, const char* field, const std::string& where) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string()) {
    throw ValidationError("MalformedRecord", where + ": missing string field '" + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, std::string_view source) {
  std::vector<ChapterNode> chapters;
  std::vector<StoryPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("MalformedRecord", where + ": " + e.what());
    }
    if (!rec.is_object()) throw ValidationError("MalformedRecord", where + ": record is not an object");
    const std::string kind = require_string(rec, "kind", where);
    try {
      if (kind == "chapter") {
        chapters.push_back({require_string(rec, "id", where), require_string(rec, "name", where),
                            rec.value("explanation", std::string{}),
                            origin_from_string(require_string(rec, "origin", where))});
      } else if (kind == "pair") {
        pairs.push_back({require_string(rec, "id", where), require_string(rec, "chapter_id", where),
                         require_string(rec, "title", where),
                         {require_string(rec, "introduction", where), require_string(rec, "main_body", where),
                          require_string(rec, "conclusion", where)},
                         origin_from_string(require_string(rec, "origin", where))});
      } else {
        throw ValidationError("MalformedRecord", where + ": unknown kind '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      if (std::string_view(e.what()).starts_with(where)) throw;
      throw ValidationError(e.code(), where + ": " + e.what());
    }
  }
  Corpus corpus(std::move(chapters), std::move(pairs));
  corpus.validate();
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("IoError", "cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& c : corpus.chapters()) {
    ordered_json rec{{"kind", "chapter"}, {"id", c.id}, {"name", c.name},
                     {"explanation", c.explanation}, {"origin", to_string(c.origin)}};
    out += rec.dump() + "\n";
  }
  for (const auto& p : corpus.pairs()) {
    ordered_json rec{{"kind", "pair"},
                     {"id", p.id},
                     {"chapter_id", p.chapter_id},
                     {"title", p.title},
                     {"introduction", p.content.introduction},
                     {"main_body", p.content.main_body},
                     {"conclusion", p.content.conclusion},
                     {"origin", to_string(p.origin)}};
    out += rec.dump() + "\n";
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, serialize_corpus(corpus));
}

}  // namespace ssbench::corpus
