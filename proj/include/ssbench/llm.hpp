#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssbench/config.hpp"

namespace ssbench::llm {

enum class Stage { explain_chapters, expand_chapters, generate_titles, generate_stories, evaluate_models };

inline constexpr Stage kAllStages[] = {Stage::explain_chapters, Stage::expand_chapters, Stage::generate_titles,
                                       Stage::generate_stories, Stage::evaluate_models};

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

struct GenerationParams {
  double temperature = 1.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int beam_size = 1;  // 0 means "not sent"
  int max_tokens = 1024;
  std::vector<std::string> stop_sequences;

  void validate() const;  // throws ValidationError("InvalidParams")
  bool operator==(const GenerationParams&) const = default;
};

using StagePresets = std::map<Stage, GenerationParams>;

// Decoding settings used for each pipeline stage.
const StagePresets& stage_presets();
const GenerationParams& preset(Stage stage);

enum class FinishReason { stop, length, error };
std::string_view to_string(FinishReason reason);

struct Completion {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  std::optional<std::string> matched_stop;
};

// Cuts `c.text` at the earliest occurrence of any stop sequence. On a tie
// in position the longer stop wins. Returns whether anything was cut.
bool apply_stops(Completion& c, const std::vector<std::string>& stops);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(Stage stage, const std::string& prompt, const GenerationParams& params) = 0;
  virtual std::string name() const = 0;
};

std::string sha256_hex(std::string_view data);

// "<stage>:<sha256 of prompt>"
std::string fixture_key(Stage stage, std::string_view prompt);

class MockBackend : public Backend {
 public:
  MockBackend() = default;
  static std::unique_ptr<MockBackend> load(const std::filesystem::path& jsonl);

  void add(std::string key, std::string text);
  void add(Stage stage, std::string_view prompt, std::string text) { add(fixture_key(stage, prompt), std::move(text)); }

  Completion complete(Stage stage, const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override { return "mock"; }

  std::size_t calls() const { return calls_.load(); }
  std::size_t size() const { return fixtures_.size(); }

 private:
  std::unordered_map<std::string, std::string> fixtures_;
  std::atomic<std::size_t> calls_{0};
};

// Answers every prompt through a callback; used to synthesise fixtures.
class ScriptedBackend : public Backend {
 public:
  using Responder = std::function<std::string(Stage, const std::string&)>;
  explicit ScriptedBackend(Responder responder) : responder_(std::move(responder)) {}

  Completion complete(Stage stage, const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override { return "scripted"; }

 private:
  Responder responder_;
};

// Passes calls through and keeps the raw (pre-stop) text by fixture key.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  Completion complete(Stage stage, const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override { return "recording(" + inner_.name() + ")"; }

  // One JSON object per line, sorted by key.
  void save(const std::filesystem::path& jsonl) const;
  std::size_t size() const;

 private:
  Backend& inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> recorded_;
};

class Semaphore {
 public:
  explicit Semaphore(std::size_t permits) : permits_(permits) {}
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t permits_;
};

struct HttpOptions {
  std::string endpoint;  // e.g. https://api.openai.com/v1
  std::string model = "gpt-4o";
  std::string api_key;
  int timeout_seconds = 60;
  int max_attempts = 3;
  int retry_base_ms = 500;
  std::size_t max_concurrency = 4;
};

// OpenAI-compatible chat/completions client.
//
// Request body: {"model", "messages": [{"role":"user","content":prompt}],
// "temperature", "top_p", "frequency_penalty", "presence_penalty",
// "max_tokens", "stop" (first four stops, omitted when empty)}.
// Beam size has no chat/completions equivalent and is dropped with a warning.
// Reply: choices[0].message.content and choices[0].finish_reason.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpOptions options);

  Completion complete(Stage stage, const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override { return "http"; }

  static std::string request_body(const std::string& model, const std::string& prompt, const GenerationParams& params);
  // Throws IoError("MalformedResponse").
  static Completion parse_response(std::string_view body);

 private:
  HttpOptions options_;
  std::string base_;
  std::string path_prefix_;
  Semaphore slots_;
  std::once_flag beam_warning_;
};

// backend.kind = "mock" (needs backend.fixtures) or "http" (reads
// SSBENCH_API_KEY from the environment).
std::unique_ptr<Backend> make_backend(const Config& config);

}  // namespace ssbench::llm
