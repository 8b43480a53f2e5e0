#include <json.hpp>

#include "ssbench/error.hpp"
#include "ssbench/llm.hpp"
#include "ssbench/util.hpp"

namespace ssbench::llm {

using nlohmann::ordered_json;

std::unique_ptr<MockBackend> MockBackend::load(const std::filesystem::path& jsonl) {
  auto mock = std::make_unique<MockBackend>();
  std::size_t line_no = 0;
  for (const auto& line : split_lines(read_file(jsonl))) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = ordered_json::parse(line);
      mock->add(j.at("key").get<std::string>(), j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("MalformedRecord",
                            jsonl.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return mock;
}

void MockBackend::add(std::string key, std::string text) { fixtures_[std::move(key)] = std::move(text); }

Completion MockBackend::complete(Stage stage, const std::string& prompt, const GenerationParams& params) {
  ++calls_;
  std::string key = fixture_key(stage, prompt);
  auto it = fixtures_.find(key);
  if (it == fixtures_.end()) throw IoError("MissingFixture", "no fixture for " + key);
  Completion c{it->second, FinishReason::stop, std::nullopt};
  apply_stops(c, params.stop_sequences);
  return c;
}

Completion RecordingBackend::complete(Stage stage, const std::string& prompt, const GenerationParams& params) {
  GenerationParams raw = params;
  raw.stop_sequences.clear();
  Completion c = inner_.complete(stage, prompt, raw);
  {
    std::lock_guard lock(mu_);
    recorded_[fixture_key(stage, prompt)] = c.text;
  }
  apply_stops(c, params.stop_sequences);
  return c;
}

void RecordingBackend::save(const std::filesystem::path& jsonl) const {
  std::string out;
  std::lock_guard lock(mu_);
  for (const auto& [key, text] : recorded_) {
    ordered_json j;
    j["key"] = key;
    j["text"] = text;
    out += j.dump() + "\n";
  }
  write_file(jsonl, out);
}

std::size_t RecordingBackend::size() const {
  std::lock_guard lock(mu_);
  return recorded_.size();
}

}  // namespace ssbench::llm
