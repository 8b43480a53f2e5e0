#include <algorithm>
#include <regex>

#include "ssbench/error.hpp"
#include "ssbench/lint.hpp"
#include "ssbench/util.hpp"

namespace ssbench::lint {

std::string_view to_string(Part p) {
  switch (p) {
    case Part::title: return "title";
    case Part::introduction: return "introduction";
    case Part::main_body: return "main_body";
    case Part::conclusion: return "conclusion";
  }
  return "?";
}

std::string_view to_string(SentenceKind k) { return k == SentenceKind::coaching ? "coaching" : "descriptive"; }

namespace {

const std::regex& marker_regex() {
  static const std::regex re(R"(^\s*(?:\d+\s*[.)]\s*)?#+\s*(title|introduction|main\s*body|conclusion)\s*#+\s*:?\s*(.*)$)",
                             std::regex::icase | std::regex::optimize);
  return re;
}

Part part_from_label(std::string label) {
  label = to_lower_ascii(label);
  if (label == "title") return Part::title;
  if (label == "introduction") return Part::introduction;
  if (label == "conclusion") return Part::conclusion;
  return Part::main_body;
}

constexpr std::array<std::string_view, 5> kAbbreviations = {"mr.", "mrs.", "dr.", "e.g.", "i.e."};

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace

StoryScan scan_story(std::string_view raw) {
  StoryScan scan;
  std::optional<Part> current;
  std::vector<std::string> buffer;
  auto flush = [&] {
    if (current) scan.parts[static_cast<std::size_t>(*current)].text = trim(join(buffer, "\n"));
    buffer.clear();
  };

  std::size_t offset = 0;
  for (const auto& line : split_lines(raw)) {
    std::smatch m;
    bool handled = false;
    if (std::regex_match(line, m, marker_regex())) {
      Part p = part_from_label(m[1].str());
      auto& slot = scan.parts[static_cast<std::size_t>(p)];
      if (!slot.present) {
        flush();
        slot.present = true;
        slot.position = offset;
        current = p;
        if (auto rest = trim(m[2].str()); !rest.empty()) buffer.push_back(rest);
        handled = true;
      }
    }
    if (!handled && current) buffer.push_back(line);
    offset += line.size() + 1;
  }
  flush();

  // Longest in-order run of present labels (LIS over at most four items).
  std::vector<std::size_t> positions;
  for (const auto& p : scan.parts) {
    if (p.present) positions.push_back(p.position);
  }
  std::vector<std::size_t> best(positions.size(), 1);
  std::size_t lis = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (positions[j] < positions[i]) best[i] = std::max(best[i], best[j] + 1);
    }
    lis = std::max(lis, best[i]);
  }
  scan.misordered = positions.size() - lis;
  return scan;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string s = trim(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    // Closing quotes and brackets, ASCII or typographic (U+2019, U+201D).
    for (;;) {
      if (j < text.size() && is_closer(text[j])) {
        ++j;
      } else if (j + 3 <= text.size() &&
                 (text.compare(j, 3, "\xE2\x80\x9D") == 0 || text.compare(j, 3, "\xE2\x80\x99") == 0)) {
        j += 3;
      } else {
        break;
      }
    }
    const bool at_boundary = j == text.size() || whitespace_width(text, j) > 0;
    if (!at_boundary) {
      i = j;
      continue;
    }
    if (c == '.' && j == i + 1) {
      std::size_t w = i;
      while (w > start && whitespace_width(text, w - 1) == 0) --w;
      std::string word = to_lower_ascii(text.substr(w, i + 1 - w));
      if (std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end()) {
        i = j;
        continue;
      }
    }
    emit(j);
    i = j;
  }
  emit(text.size());
  return out;
}

namespace {

void add_sentences(StoryStructure& st, Part part, const std::string& text, const LintConfig& config) {
  std::size_t index = 0;
  for (auto& s : segment_sentences(text)) {
    Classification c = classify_sentence(s, config);
    st.sentences.push_back({std::move(s), index++, part, c.kind, c.rule});
  }
}

StoryStructure build_structure(std::string title, corpus::StoryContent parts, std::string raw,
                               const LintConfig& config) {
  StoryStructure st;
  st.title = std::move(title);
  st.parts = std::move(parts);
  st.raw = std::move(raw);
  add_sentences(st, Part::introduction, st.parts.introduction, config);
  add_sentences(st, Part::main_body, st.parts.main_body, config);
  add_sentences(st, Part::conclusion, st.parts.conclusion, config);
  return st;
}

}  // namespace

StoryStructure parse_story(std::string_view raw, const LintConfig& config) {
  StoryScan scan = scan_story(raw);
  for (Part p : {Part::title, Part::introduction, Part::main_body, Part::conclusion}) {
    const auto& slot = scan.at(p);
    if (!slot.present || slot.text.empty()) {
      throw ValidationError("MissingPart", "MissingPart(" + std::string(to_string(p)) + ")");
    }
  }
  if (scan.misordered > 0) {
    throw ValidationError("OrderViolation", "story parts are not in Title, Introduction, Main Body, Conclusion order");
  }
  return build_structure(scan.at(Part::title).text,
                         {scan.at(Part::introduction).text, scan.at(Part::main_body).text,
                          scan.at(Part::conclusion).text},
                         std::string(raw), config);
}

StoryStructure structure_from_pair(const corpus::StoryPair& pair, const LintConfig& config) {
  return build_structure(pair.title, pair.content, labeled_text(pair.title, pair.content), config);
}

std::string labeled_text(std::string_view title, const corpus::StoryContent& content) {
  std::string out;
  out.append("1. # Title #:\n").append(title).append("\n");
  out.append("2. # Introduction #:\n").append(content.introduction).append("\n");
  out.append("3. # Main Body #:\n").append(content.main_body).append("\n");
  out.append("4. # Conclusion #:\n").append(content.conclusion);
  return out;
}

}  // namespace ssbench::lint
