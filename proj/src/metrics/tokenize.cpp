#include <cctype>

#include "ssbench/metrics.hpp"
#include "ssbench/util.hpp"

namespace ssbench::metrics {
namespace {

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

// Typographic quotes and dashes count as punctuation when stripping.
std::size_t unicode_punct_width(std::string_view s, std::size_t pos) {
  if (pos + 2 < s.size() && static_cast<unsigned char>(s[pos]) == 0xE2 &&
      static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    unsigned char c = static_cast<unsigned char>(s[pos + 2]);
    if ((c >= 0x93 && c <= 0x94) || (c >= 0x98 && c <= 0x9D) || c == 0xA6) return 3;
  }
  return 0;
}

std::size_t trailing_unicode_punct_width(std::string_view s, std::size_t end) {
  if (end >= 3 && unicode_punct_width(s, end - 3) == 3) return 3;
  return 0;
}

template <typename Emit>
void scan_words(std::string_view text, Emit&& emit) {
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t w = whitespace_width(text, i);
    if (w > 0) {
      i += w;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && whitespace_width(text, i) == 0) ++i;
    emit(start, i);
  }
}

}  // namespace

std::vector<TokenSpan> tokenize_with_offsets(std::string_view text) {
  std::vector<TokenSpan> out;
  scan_words(text, [&](std::size_t b, std::size_t e) {
    for (;;) {
      if (b < e && is_ascii_punct(text[b])) {
        ++b;
      } else if (std::size_t w = unicode_punct_width(text, b); b < e && w > 0 && b + w <= e) {
        b += w;
      } else {
        break;
      }
    }
    for (;;) {
      if (e > b && is_ascii_punct(text[e - 1])) {
        --e;
      } else if (std::size_t w = trailing_unicode_punct_width(text, e); e > b && w > 0 && e - w >= b) {
        e -= w;
      } else {
        break;
      }
    }
    if (b < e) {
      std::string tok = to_lower_ascii(text.substr(b, e - b));
      // Curly apostrophes inside a word compare equal to ASCII ones.
      for (std::size_t p = tok.find("\xE2\x80\x99"); p != std::string::npos; p = tok.find("\xE2\x80\x99", p)) {
        tok.replace(p, 3, "'");
      }
      out.push_back({std::move(tok), b, e});
    }
  });
  return out;
}

TokenSequence tokenize(std::string_view text, TokenMode mode) {
  TokenSequence seq;
  if (mode == TokenMode::words) {
    scan_words(text, [&](std::size_t b, std::size_t e) { seq.tokens.emplace_back(text.substr(b, e - b)); });
    return seq;
  }
  for (auto& span : tokenize_with_offsets(text)) seq.tokens.push_back(std::move(span.token));
  return seq;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  scan_words(text, [&](std::size_t, std::size_t) { ++n; });
  return n;
}

}  // namespace ssbench::metrics
