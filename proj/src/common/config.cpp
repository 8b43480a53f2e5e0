#include "ssbench/config.hpp"

#include <algorithm>
#include <charconv>

#include "ssbench/error.hpp"
#include "ssbench/util.hpp"

namespace ssbench {
namespace {

std::string unquote(std::string_view v) {
  std::string s = trim(v);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s.front() == '"' && s[i] == '\\' && i + 2 < s.size()) {
        char n = s[++i];
        switch (n) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: out.push_back(n);
        }
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }
  return s;
}

// Strips a trailing `# comment` that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote != 0) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

Config Config::parse(std::string_view text, std::string_view source) {
  Config cfg;
  std::string section;
  int lineno = 0;
  for (const auto& raw_line : split_lines(text)) {
    ++lineno;
    std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    auto where = std::string(source) + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("ConfigError", where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("ConfigError", where + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError("ConfigError", where + ": empty key");
    std::string value = trim(std::string_view(line).substr(eq + 1));
    cfg.raw_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void Config::validate_schema() const {
  const auto& schema = config_schema();
  for (const auto& [key, value] : raw_) {
    bool known = std::any_of(schema.begin(), schema.end(),
                             [&](const ConfigKey& k) { return k.name == key; });
    if (!known) throw ValidationError("ConfigError", "unknown config key '" + key + "'");
  }
}

bool Config::has(std::string_view key) const { return raw_.find(key) != raw_.end(); }

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
  auto it = raw_.find(key);
  return it == raw_.end() ? std::string(fallback) : unquote(it->second);
}

long long Config::get_int(std::string_view key, long long fallback) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) return fallback;
  std::string v = unquote(it->second);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError("ConfigError", "'" + std::string(key) + "' is not an integer: " + v);
  }
  return out;
}

double Config::get_double(std::string_view key, double fallback) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) return fallback;
  std::string v = unquote(it->second);
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ValidationError("ConfigError", "'" + std::string(key) + "' is not a number: " + v);
  }
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) return fallback;
  std::string v = to_lower_ascii(unquote(it->second));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("ConfigError", "'" + std::string(key) + "' is not a boolean: " + v);
}

std::vector<std::string> Config::get_list(std::string_view key) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) return {};
  std::string v = trim(it->second);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') return {unquote(v)};
  std::vector<std::string> out;
  std::string current;
  char quote = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    char c = v[i];
    if (quote != 0) {
      current.push_back(c);
      if (c == '\\' && quote == '"' && i + 2 < v.size()) {
        current.push_back(v[++i]);
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
      current.push_back(c);
    } else if (c == ',') {
      if (!trim(current).empty()) out.push_back(unquote(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!trim(current).empty()) out.push_back(unquote(current));
  return out;
}

void Config::set(std::string_view key, std::string_view raw_value) {
  raw_[std::string(key)] = std::string(raw_value);
}

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"run.seed", "int", "RNG seed used when --seed is not given (default 0)"},
      {"run.jobs", "int", "global parallelism cap (default 4)"},
      {"backend.kind", "string", "mock | http (default mock)"},
      {"backend.endpoint", "string", "base URL of an OpenAI-compatible API, e.g. https://api.openai.com/v1"},
      {"backend.model", "string", "model name sent with every request (default gpt-4o)"},
      {"backend.fixtures", "string", "mock fixture JSONL path"},
      {"backend.max_concurrency", "int", "in-flight request bound (default 4)"},
      {"backend.timeout_seconds", "int", "per-request timeout (default 60)"},
      {"backend.retry_base_ms", "int", "first backoff delay; doubles per attempt (default 500)"},
      {"backend.max_attempts", "int", "attempts per request including the first (default 3)"},
      {"pipeline.seed_corpus", "string", "seed corpus JSONL used by grow"},
      {"pipeline.n_chapters", "int", "total chapters (seed + generated) to reach"},
      {"pipeline.titles_per_chapter", "int", "accepted titles each chapter must reach"},
      {"pipeline.stories_per_title", "int", "stories per generated title (default 1)"},
      {"pipeline.dedup_threshold", "real", "ROUGE-L F1 at or above which a candidate is a duplicate (default 0.7)"},
      {"pipeline.stall_limit", "int", "consecutive fruitless rounds before giving up (default 20)"},
      {"pipeline.title_dedup_scope", "string", "global | chapter (default global)"},
      {"pipeline.checkpoint_dir", "string", "directory for stage checkpoints"},
      {"pipeline.max_story_words", "int", "word budget for a story's three parts (default 400)"},
      {"lint.lexicon_dir", "string", "directory holding the lexicon files (default <data>/lexicons)"},
      {"lint.lexicon_version", "int", "version every lexicon file must declare (default 1)"},
      {"lint.exempt_quoted_speech", "bool", "skip quoted speech in perspective checks (default false)"},
      {"eval.tokenization", "string", "lowercase | raw (default lowercase)"},
      {"server.addr", "string", "HOST:PORT to listen on (default 127.0.0.1:8080)"},
      {"server.db", "string", "SQLite database path (default annotations.db)"},
      {"server.session_ttl_minutes", "int", "session lifetime (default 720)"},
      {"server.password_hashing", "string", "interactive | fast (fast is for tests only)"},
      {"server.static_dir", "string", "directory served at / for the web frontend"},
      {"server.assignment_mode", "string", "replicated | exclusive (default replicated)"},
      {"server.allow_admin_signup", "bool", "whether /auth/register may create administrators (default true)"},
  };
  return schema;
}

}  // namespace ssbench
