#include <cmath>

#include "ssbench/error.hpp"
#include "ssbench/llm.hpp"

namespace ssbench::llm {

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::explain_chapters, "explain_chapters"}, {Stage::expand_chapters, "expand_chapters"},
    {Stage::generate_titles, "generate_titles"},   {Stage::generate_stories, "generate_stories"},
    {Stage::evaluate_models, "evaluate_models"},
};

GenerationParams row(double temp, double top_p, double freq, double pres, int beam, int max_len,
                     std::vector<std::string> stops) {
  return {temp, top_p, freq, pres, beam, max_len, std::move(stops)};
}

}  // namespace

std::string_view to_string(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  for (const auto& [s, n] : kStageNames) {
    if (n == name) return s;
  }
  throw ValidationError("UnknownStage", "unknown stage '" + std::string(name) + "'");
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "?";
}

void GenerationParams::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("InvalidParams", what); };
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) bad("temperature must be >= 0");
  if (!(top_p >= 0.0 && top_p <= 1.0)) bad("top_p must be in [0, 1]");
  if (!std::isfinite(frequency_penalty) || !std::isfinite(presence_penalty)) bad("penalties must be finite");
  if (beam_size < 0) bad("beam_size must be >= 0");
  if (max_tokens <= 0) bad("max_tokens must be > 0");
  for (const auto& s : stop_sequences) {
    if (s.empty()) bad("stop sequences must be non-empty");
  }
}

const StagePresets& stage_presets() {
  static const StagePresets presets = {
      {Stage::explain_chapters, row(1, 0.95, 0, 0, 1, 100, {})},
      {Stage::expand_chapters, row(0.7, 0.5, 0, 2, 1, 1024, {"\n\n", "\n16", "16.", "16 ."})},
      {Stage::generate_titles, row(0.7, 1, 0, 2, 1, 1024, {"\n\n", "\n16", "16.", "16 ."})},
      {Stage::generate_stories, row(0.7, 1, 0, 2, 1, 1024, {"Autistic", "autistic", "Autism", "autism", "You", "you"})},
      {Stage::evaluate_models, row(0, 0, 0, 0, 0, 1024, {})},
  };
  return presets;
}

const GenerationParams& preset(Stage stage) { return stage_presets().at(stage); }

bool apply_stops(Completion& c, const std::vector<std::string>& stops) {
  std::size_t best = std::string::npos;
  const std::string* hit = nullptr;
  for (const auto& s : stops) {
    if (s.empty()) continue;
    std::size_t pos = c.text.find(s);
    if (pos == std::string::npos) continue;
    if (pos < best || (pos == best && s.size() > hit->size())) {
      best = pos;
      hit = &s;
    }
  }
  if (!hit) return false;
  c.text.resize(best);
  c.finish_reason = FinishReason::stop;
  c.matched_stop = *hit;
  return true;
}

}  // namespace ssbench::llm
