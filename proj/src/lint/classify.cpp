#include "ssbench/lint.hpp"

namespace ssbench::lint {

Classification classify_sentence(std::string_view sentence, const LintConfig& config) {
  const auto tokens = metrics::tokenize_with_offsets(sentence);
  const auto matches = find_phrases(tokens, config.coaching);
  if (matches.empty()) return {};
  const auto& m = matches.front();
  return {SentenceKind::coaching, phrase_text(config.coaching, m.phrase), tokens[m.first_token].begin,
          tokens[m.last_token].end};
}

}  // namespace ssbench::lint
