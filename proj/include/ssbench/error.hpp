#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ssbench {

// Every failure surfaced by the toolkit carries a stable machine-readable
// code (e.g. "MissingPart", "StallLimit") next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Input that violates a documented contract (bad file, bad config, bad
// request). Maps to CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failure talking to the outside world: network, disk, backend.
// Maps to CLI exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssbench
