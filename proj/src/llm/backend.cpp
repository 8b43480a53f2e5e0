#include <cstdlib>

#include <sodium.h>

#include "ssbench/error.hpp"
#include "ssbench/llm.hpp"

namespace ssbench::llm {

std::string sha256_hex(std::string_view data) {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw IoError("CryptoInit", "libsodium failed to initialise");
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(data.data()), data.size());
  char hex[crypto_hash_sha256_BYTES * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
  return hex;
}

std::string fixture_key(Stage stage, std::string_view prompt) {
  return std::string(to_string(stage)) + ":" + sha256_hex(prompt);
}

void Semaphore::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return permits_ > 0; });
  --permits_;
}

void Semaphore::release() {
  {
    std::lock_guard lock(mu_);
    ++permits_;
  }
  cv_.notify_one();
}

Completion ScriptedBackend::complete(Stage stage, const std::string& prompt, const GenerationParams& params) {
  Completion c{responder_(stage, prompt), FinishReason::stop, std::nullopt};
  apply_stops(c, params.stop_sequences);
  return c;
}

std::unique_ptr<Backend> make_backend(const Config& config) {
  std::string kind = config.get_string("backend.kind", "mock");
  if (kind == "mock") {
    std::string fixtures = config.get_string("backend.fixtures", "");
    if (fixtures.empty()) throw ValidationError("MissingFixture", "backend.kind = mock needs backend.fixtures");
    return MockBackend::load(fixtures);
  }
  if (kind == "http") {
    HttpOptions o;
    o.endpoint = config.get_string("backend.endpoint", "");
    if (o.endpoint.empty()) throw ValidationError("InvalidConfig", "backend.endpoint is required for http backend");
    o.model = config.get_string("backend.model", o.model);
    const char* key = std::getenv("SSBENCH_API_KEY");
    if (!key || !*key) throw IoError("AuthError", "SSBENCH_API_KEY is not set");
    o.api_key = key;
    o.timeout_seconds = static_cast<int>(config.get_int("backend.timeout_seconds", o.timeout_seconds));
    o.max_attempts = static_cast<int>(config.get_int("backend.max_attempts", o.max_attempts));
    o.retry_base_ms = static_cast<int>(config.get_int("backend.retry_base_ms", o.retry_base_ms));
    o.max_concurrency = static_cast<std::size_t>(config.get_int("backend.max_concurrency", 4));
    return std::make_unique<HttpBackend>(std::move(o));
  }
  throw ValidationError("InvalidConfig", "backend.kind must be 'mock' or 'http', got '" + kind + "'");
}

}  // namespace ssbench::llm
