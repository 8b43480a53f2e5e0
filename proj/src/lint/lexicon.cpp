#include <mutex>

#include "ssbench/error.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/util.hpp"

namespace ssbench::lint {

Lexicon Lexicon::parse(std::string_view text, std::string name) {
  Lexicon lex;
  lex.name = std::move(name);
  bool have_version = false;
  for (const auto& raw_line : split_lines(text)) {
    std::string line = trim(raw_line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string body = trim(std::string_view(line).substr(1));
      if (starts_with_icase(body, "version:")) {
        try {
          lex.version = std::stoi(trim(std::string_view(body).substr(8)));
          have_version = true;
        } catch (const std::exception&) {
          throw ValidationError("LexiconError", lex.name + ": bad version line '" + line + "'");
        }
      }
      continue;
    }
    std::vector<std::string> tokens;
    for (auto& t : metrics::tokenize(line, metrics::TokenMode::words).tokens) tokens.push_back(to_lower_ascii(t));
    lex.phrases.push_back(std::move(tokens));
  }
  if (!have_version) throw ValidationError("LexiconError", lex.name + ": missing '# version: N' header");
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.stem().string());
}

std::vector<PhraseMatch> find_phrases(const std::vector<metrics::TokenSpan>& tokens, const Lexicon& lexicon) {
  std::vector<PhraseMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::optional<PhraseMatch> best;
    for (std::size_t p = 0; p < lexicon.phrases.size(); ++p) {
      const auto& phrase = lexicon.phrases[p];
      if (phrase.empty() || i + phrase.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < phrase.size() && ok; ++k) {
        ok = phrase[k] == "*" || phrase[k] == tokens[i + k].token;
      }
      if (ok && (!best || phrase.size() > best->last_token - best->first_token + 1)) {
        best = PhraseMatch{p, i, i + phrase.size() - 1};
      }
    }
    if (best) {
      out.push_back(*best);
      i = best->last_token + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::string phrase_text(const Lexicon& lexicon, std::size_t phrase) { return join(lexicon.phrases.at(phrase), " "); }

LintConfig LintConfig::load(const std::filesystem::path& dir, int expected_version) {
  auto load_checked = [&](const char* file) {
    Lexicon lex = Lexicon::load(dir / file);
    if (lex.version != expected_version) {
      throw ValidationError("LexiconVersionMismatch", lex.name + " is version " + std::to_string(lex.version) +
                                                          ", config pins " + std::to_string(expected_version));
    }
    return lex;
  };
  LintConfig cfg;
  cfg.lexicon_version = expected_version;
  cfg.coaching = load_checked("coaching.txt");
  cfg.negative_behavior = load_checked("negative_behavior.txt");
  cfg.tone = load_checked("tone.txt");
  cfg.tone_frames = load_checked("tone_frames.txt");
  cfg.idioms = load_checked("idioms.txt");
  cfg.vocabulary = load_checked("vocabulary.txt");
  for (const auto& phrase : load_checked("stopwords.txt").phrases) cfg.stopwords.insert(join(phrase, " "));
  return cfg;
}

const LintConfig& LintConfig::builtin() {
  static const LintConfig cfg = load(data_dir() / "lexicons");
  return cfg;
}

}  // namespace ssbench::lint
