#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ssbench/error.hpp"
#include "ssbench/llm.hpp"

namespace ssbench::llm {

using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxWireStops = 4;

struct SlotGuard {
  Semaphore& sem;
  explicit SlotGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

}  // namespace

HttpBackend::HttpBackend(HttpOptions options)
    : options_(std::move(options)), slots_(std::max<std::size_t>(1, options_.max_concurrency)) {
  const std::string& ep = options_.endpoint;
  auto scheme_end = ep.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("InvalidConfig", "endpoint needs a scheme: " + ep);
  auto path_start = ep.find('/', scheme_end + 3);
  base_ = ep.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : ep.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

std::string HttpBackend::request_body(const std::string& model, const std::string& prompt,
                                      const GenerationParams& params) {
  ordered_json body;
  body["model"] = model;
  body["messages"] = ordered_json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = params.temperature;
  body["top_p"] = params.top_p;
  body["frequency_penalty"] = params.frequency_penalty;
  body["presence_penalty"] = params.presence_penalty;
  body["max_tokens"] = params.max_tokens;
  if (!params.stop_sequences.empty()) {
    auto stops = ordered_json::array();
    for (std::size_t i = 0; i < params.stop_sequences.size() && i < kMaxWireStops; ++i) {
      stops.push_back(params.stop_sequences[i]);
    }
    body["stop"] = stops;
  }
  return body.dump();
}

Completion HttpBackend::parse_response(std::string_view body) {
  ordered_json j = ordered_json::parse(body, nullptr, false);
  if (j.is_discarded()) throw IoError("MalformedResponse", "response is not JSON");
  try {
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    Completion c;
    c.text = content.is_null() ? std::string() : content.get<std::string>();
    std::string reason = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                             ? choice["finish_reason"].get<std::string>()
                             : "stop";
    c.finish_reason = reason == "length" ? FinishReason::length : FinishReason::stop;
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("MalformedResponse", std::string("unexpected response shape: ") + e.what());
  }
}

Completion HttpBackend::complete(Stage stage, const std::string& prompt, const GenerationParams& params) {
  params.validate();
  if (params.beam_size > 1) {
    std::call_once(beam_warning_, [&] {
      spdlog::warn("beam_size={} is not supported by chat/completions and is ignored", params.beam_size);
    });
  }
  const std::string body = request_body(options_.model, prompt, params);
  const std::string path = path_prefix_ + "/chat/completions";

  SlotGuard slot(slots_);
  httplib::Client client(base_);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  client.set_write_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_code = "NetworkError";
  std::string last_detail;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = std::chrono::milliseconds(static_cast<long long>(options_.retry_base_ms) << (attempt - 2));
      std::this_thread::sleep_for(delay);
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_code = "NetworkError";
      last_detail = httplib::to_string(res.error());
      spdlog::debug("{} attempt {} failed: {}", to_string(stage), attempt, last_detail);
      continue;
    }
    int status = res->status;
    if (status == 200) {
      Completion c = parse_response(res->body);
      apply_stops(c, params.stop_sequences);
      return c;
    }
    if (status == 401 || status == 403) throw IoError("AuthError", "HTTP " + std::to_string(status) + ": " + res->body);
    if (status == 429) {
      last_code = "RateLimited";
    } else if (status >= 500) {
      last_code = "NetworkError";
    } else {
      throw IoError("RequestRejected", "HTTP " + std::to_string(status) + ": " + res->body);
    }
    last_detail = "HTTP " + std::to_string(status);
    spdlog::debug("{} attempt {} failed: {}", to_string(stage), attempt, last_detail);
  }
  throw IoError(last_code, last_detail + " after " + std::to_string(options_.max_attempts) + " attempts");
}

}  // namespace ssbench::llm
