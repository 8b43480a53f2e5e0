#include <algorithm>
#include <unordered_map>

#include "ssbench/eval.hpp"
#include "ssbench/util.hpp"

namespace ssbench::eval {

namespace {

const std::unordered_map<std::string, std::string>& irregular() {
  static const std::unordered_map<std::string, std::string> forms = {
      {"made", "make"},   {"went", "go"},      {"goes", "go"},          {"ate", "eat"},      {"took", "take"},
      {"got", "get"},     {"gave", "give"},    {"said", "say"},         {"saw", "see"},      {"told", "tell"},
      {"thought", "think"}, {"felt", "feel"},  {"found", "find"},       {"left", "leave"},   {"met", "meet"},
      {"kept", "keep"},   {"came", "come"},    {"ran", "run"},          {"sat", "sit"},      {"stood", "stand"},
      {"wore", "wear"},   {"won", "win"},      {"lost", "lose"},        {"bought", "buy"},   {"slept", "sleep"},
      {"rode", "ride"},   {"flew", "fly"},     {"drew", "draw"},        {"wrote", "write"},  {"spoke", "speak"},
      {"swam", "swim"},   {"sang", "sing"},    {"drank", "drink"},      {"taught", "teach"}, {"heard", "hear"},
      {"held", "hold"},   {"paid", "pay"},     {"sold", "sell"},        {"sent", "send"},    {"spent", "spend"},
      {"threw", "throw"}, {"woke", "wake"},    {"hid", "hide"},         {"shook", "shake"},  {"caught", "catch"},
      {"dealt", "deal"},  {"understood", "understand"}, {"chose", "choose"}, {"did", "do"}, {"done", "do"},
      {"had", "have"},    {"has", "have"},
  };
  return forms;
}

// Leading words skipped before looking for the verb.
const std::vector<std::string>& skip_words() {
  static const std::vector<std::string> words = {"how", "to", "what", "do", "does", "can", "will",
                                                 "i",   "my", "the",  "a"};
  return words;
}

bool contains(const lint::Lexicon& lex, std::string_view word) {
  return std::any_of(lex.phrases.begin(), lex.phrases.end(),
                     [&](const auto& p) { return p.size() == 1 && p[0] == word; });
}

std::string undouble(std::string_view stem) {
  std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2]) return std::string(stem.substr(0, n - 1));
  return "";
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

const VerbNounLexicon& VerbNounLexicon::builtin() {
  static const VerbNounLexicon lex = [] {
    VerbNounLexicon v;
    auto dir = data_dir() / "lexicons";
    v.verbs = lint::Lexicon::load(dir / "verbs.txt");
    v.nouns = lint::Lexicon::load(dir / "nouns.txt");
    for (const auto& p : lint::Lexicon::load(dir / "stopwords.txt").phrases) {
      if (p.size() == 1) v.stopwords.push_back(p[0]);
    }
    return v;
  }();
  return lex;
}

std::optional<std::string> verb_lemma(std::string_view token, const VerbNounLexicon& lex) {
  std::string t = to_lower_ascii(token);
  std::vector<std::string> candidates;
  if (auto it = irregular().find(t); it != irregular().end()) candidates.push_back(it->second);
  candidates.push_back(t);
  if (ends_with(t, "ies")) candidates.push_back(t.substr(0, t.size() - 3) + "y");
  if (ends_with(t, "es")) candidates.push_back(t.substr(0, t.size() - 2));
  if (ends_with(t, "s") && !ends_with(t, "ss")) candidates.push_back(t.substr(0, t.size() - 1));
  if (ends_with(t, "ied")) candidates.push_back(t.substr(0, t.size() - 3) + "y");
  if (ends_with(t, "ed")) {
    std::string stem = t.substr(0, t.size() - 2);
    candidates.push_back(stem);
    candidates.push_back(t.substr(0, t.size() - 1));
    candidates.push_back(undouble(stem));
  }
  if (ends_with(t, "ing")) {
    std::string stem = t.substr(0, t.size() - 3);
    candidates.push_back(stem);
    candidates.push_back(stem + "e");
    candidates.push_back(undouble(stem));
  }
  for (const auto& c : candidates) {
    if (c.size() >= 2 && contains(lex.verbs, c)) return c;
  }
  return std::nullopt;
}

std::optional<VerbNoun> extract_verb_noun(std::string_view title, const VerbNounLexicon& lex) {
  auto tokens = metrics::tokenize(title, metrics::TokenMode::lowercase_words).tokens;
  std::size_t i = 0;
  const auto& skip = skip_words();
  while (i < tokens.size() && std::find(skip.begin(), skip.end(), tokens[i]) != skip.end()) ++i;

  for (; i < tokens.size(); ++i) {
    auto lemma = verb_lemma(tokens[i], lex);
    if (!lemma) continue;
    VerbNoun vn{*lemma, ""};
    for (std::size_t k = i + 1; k < tokens.size(); ++k) {
      if (contains(lex.nouns, tokens[k])) {
        vn.noun = tokens[k];
        return vn;
      }
    }
    for (std::size_t k = i + 1; k < tokens.size(); ++k) {
      if (std::find(lex.stopwords.begin(), lex.stopwords.end(), tokens[k]) == lex.stopwords.end()) {
        vn.noun = tokens[k];
        break;
      }
    }
    return vn;
  }
  return std::nullopt;
}

}  // namespace ssbench::eval
