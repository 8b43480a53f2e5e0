#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ssbench {

// Flat view of a TOML-subset file: `[section]` headers and `key = value`
// lines, where value is a quoted string, integer, real, true/false, or a
// one-line array of those. Keys are addressed as "section.key".
class Config {
 public:
  static Config parse(std::string_view text, std::string_view source = "<config>");
  static Config load(const std::filesystem::path& path);

  // Rejects keys that are not part of the published schema.
  void validate_schema() const;

  bool has(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<std::string> get_list(std::string_view key) const;

  // Command-line overrides land here; value is parsed like a file value.
  void set(std::string_view key, std::string_view raw_value);

  const std::map<std::string, std::string, std::less<>>& entries() const { return raw_; }

 private:
  std::map<std::string, std::string, std::less<>> raw_;
};

struct ConfigKey {
  std::string_view name;
  std::string_view type;
  std::string_view description;
};

// Every key the toolkit reads; printed by `ssbench config-schema`.
const std::vector<ConfigKey>& config_schema();

}  // namespace ssbench
