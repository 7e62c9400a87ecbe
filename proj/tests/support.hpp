#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace trainlab::testing {

inline std::filesystem::path fixture(const std::string& relative) {
  return std::filesystem::path(TRAINLAB_FIXTURE_DIR) / relative;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("trainlab-test-" + std::to_string(rd()) + std::to_string(rd()));
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

  std::filesystem::path write(const std::string& name, const std::string& contents) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << contents;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline double relative_error(double actual, double expected) {
  const double scale = std::max(std::abs(expected), 1e-300);
  return std::abs(actual - expected) / scale;
}

}  // namespace trainlab::testing
