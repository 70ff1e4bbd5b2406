#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "edgekit/knn.hpp"
#include "test_support.hpp"

using namespace edgekit;
using namespace edgekit::test;

TEST_CASE("single point cloud answers only itself") {
  PointCloud cloud;
  cloud.points = {Vec3(1, 2, 3)};
  KnnIndex index(cloud);
  CHECK(index.query(0, 1) == std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(index.query(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(index.query(0, 0), std::invalid_argument);
}

TEST_CASE("self is always the first neighbor") {
  PointCloud cloud = random_cloud(500, 21);
  KnnIndex index(cloud);
  for (std::size_t i = 0; i < cloud.size(); i += 37) {
    auto res = index.query(i, 4);
    CHECK(res[0] == i);
  }
}

TEST_CASE("duplicate points are all retrievable, ordered by index") {
  PointCloud cloud;
  cloud.points = {Vec3(5, 5, 5), Vec3(0, 0, 0), Vec3(5, 5, 5), Vec3(9, 9, 9)};
  KnnIndex index(cloud);
  auto res = index.query(2, 2);  // query the second copy
  CHECK(res == std::vector<std::uint32_t>{0, 2});  // tie at distance 0 -> index order
}

TEST_CASE("collinear points on the x axis") {
  PointCloud cloud;
  cloud.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  KnnIndex index(cloud);
  CHECK(index.query(0, 2) == std::vector<std::uint32_t>{0, 1});
  CHECK(index.query(0, 4) == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("queries match the brute-force oracle exactly") {
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 200 + static_cast<std::size_t>(rep) * 160;
    PointCloud cloud = random_cloud(n, 300 + static_cast<std::uint64_t>(rep));
    KnnIndex index(cloud);
    std::mt19937_64 rng(40 + static_cast<std::uint64_t>(rep));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k : {std::size_t{1}, std::size_t{16}, std::size_t{32}, std::size_t{64},
                          std::size_t{128}}) {
      if (k > n) continue;
      for (int q = 0; q < 40; ++q) {
        const std::size_t i = pick(rng);
        CHECK(index.query(i, k) == brute_force_knn(cloud.points, cloud.points[i], k));
      }
    }
  }
}

TEST_CASE("grid cloud with massive distance ties matches brute force") {
  PointCloud cloud;
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 6; ++z) cloud.points.emplace_back(x, y, z);
  KnnIndex index(cloud);
  for (std::size_t i = 0; i < cloud.size(); i += 11)
    for (std::size_t k : {std::size_t{1}, std::size_t{7}, std::size_t{27}, std::size_t{100}})
      CHECK(index.query(i, k) == brute_force_knn(cloud.points, cloud.points[i], k));
}

TEST_CASE("k-NN sets are prefixes of larger-k sets") {
  PointCloud cloud = random_cloud(700, 77);
  KnnIndex index(cloud);
  for (std::size_t i = 0; i < cloud.size(); i += 61) {
    auto big = index.query(i, 128);
    for (std::size_t k : {std::size_t{1}, std::size_t{16}, std::size_t{64}}) {
      auto small = index.query(i, k);
      CHECK(std::equal(small.begin(), small.end(), big.begin()));
    }
  }
}

TEST_CASE("arbitrary-position queries match brute force") {
  PointCloud cloud = random_cloud(400, 55);
  KnnIndex index(cloud);
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> coord(-12, 12);
  for (int q = 0; q < 50; ++q) {
    const Vec3 pos(coord(rng), coord(rng), coord(rng));
    std::vector<std::uint32_t> got;
    index.query_position(pos, 16, got);
    CHECK(got == brute_force_knn(cloud.points, pos, 16));
  }
}

TEST_CASE("empty cloud cannot be indexed") {
  PointCloud cloud;
  CHECK_THROWS_AS(KnnIndex{cloud}, std::invalid_argument);
}
