#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <system_error>
#include <unistd.h>

#include "fairmap/vectorspace.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return FAIRMAP_TEST_DATA; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fairmap-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
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

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

inline std::string point_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "x" + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
}

// `n` Gaussian points with ids x0000, x0001, ... so row order equals index order.
inline fairmap::PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim, double scale = 1.0) {
  fairmap::PointCloud cloud(dim);
  for (std::size_t i = 0; i < n; ++i) cloud.insert(point_id(i), fairmap::Vector(gaussian(rng, dim, scale)));
  return cloud;
}

}  // namespace testing
