#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "edgekit/knn.hpp"
#include "edgekit/types.hpp"

namespace edgekit::test {

inline PointCloud random_cloud(std::size_t n, std::uint64_t seed, double extent = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-extent, extent);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    cloud.points.emplace_back(dist(rng), dist(rng), dist(rng));
  return cloud;
}

// Exhaustive scan sorted by (squared distance, index); the reference every
// index query must match exactly. Plain scalar arithmetic, same expression
// shape as the library, evaluated independently.
inline std::vector<std::uint32_t> brute_force_knn(const std::vector<Vec3>& points,
                                                  const Vec3& query, std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> all;
  all.reserve(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    const double dx = query.x() - points[i].x();
    const double dy = query.y() - points[i].y();
    const double dz = query.z() - points[i].z();
    all.emplace_back(dx * dx + dy * dy + dz * dz, i);
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end());
  std::vector<std::uint32_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = all[i].second;
  return out;
}

// Haar-ish random rotation from three random axis rotations.
inline Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, 6.283185307179586);
  const double a = angle(rng), b = angle(rng), c = angle(rng);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
  rz << std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c), 0, 0, 0, 1;
  return rz * ry * rx;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("edgekit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

inline void spit(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  os << contents;
}

}  // namespace edgekit::test
