#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace ssbench::testing {

inline std::filesystem::path fixtures_dir() { return SSBENCH_FIXTURES_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return fixtures_dir() / name; }
inline std::filesystem::path templates_dir() { return SSBENCH_TEMPLATES_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ssbench-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace ssbench::testing
