#pragma once

#include "calr/core/rng.hpp"
#include "calr/core/types.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace calr::testutil {

/// n x d matrix of independent standard normal entries.
inline Matrix gaussian(Rng& rng, int n, int d) {
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

/// n x d matrix of rows uniform on the unit sphere.
inline Matrix unit_rows(Rng& rng, int n, int d) {
  Matrix m = gaussian(rng, n, d);
  for (int i = 0; i < n; ++i) m.row(i) /= m.row(i).norm();
  return m;
}

inline double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

/// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag = "calr") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
  std::filesystem::path path_;
};

}  // namespace calr::testutil
