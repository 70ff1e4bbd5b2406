#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "edgekit/baseline.hpp"
#include "edgekit/synth.hpp"
#include "test_support.hpp"

using namespace edgekit;
using namespace edgekit::test;

namespace {

PointCloud gaussian_blob(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) cloud.points.emplace_back(g(rng), g(rng), g(rng));
  return cloud;
}

}  // namespace

TEST_CASE("an exact plane never scores positive") {
  SceneSpec spec;
  spec.kind = PrimitiveKind::Plane;
  spec.size = 40;
  PointCloud cloud = generate(spec, 3);
  KnnIndex index(cloud);
  for (double r : ca_ratios(cloud, index, 64)) CHECK(r == doctest::Approx(0.0).epsilon(1e-9));

  CaConfig config;
  config.threshold = 1e-6;
  for (auto p : ca_classify(cloud, index, config)) CHECK(p == 0);
}

TEST_CASE("an isotropic blob scores near one third and fires at 0.025") {
  PointCloud cloud = gaussian_blob(10000, 4);
  KnnIndex index(cloud);
  std::vector<double> ratios = ca_ratios(cloud, index, 64);
  double mean = 0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  CHECK(mean > 0.22);
  CHECK(mean <= 1.0 / 3 + 1e-12);

  CaConfig config;  // threshold 0.025
  std::vector<std::uint8_t> preds = ca_classify(cloud, index, config);
  std::size_t fired = 0;
  for (auto p : preds) fired += p;
  CHECK(static_cast<double>(fired) / static_cast<double>(preds.size()) > 0.95);
}

TEST_CASE("wedge crease fires above 0.08 while the flat interior stays below 0.025") {
  SceneSpec spec;
  spec.kind = PrimitiveKind::Wedge;
  spec.size = 48;
  spec.angle_deg = 90;
  PointCloud cloud = generate(spec, 5);
  KnnIndex index(cloud);
  std::vector<double> ratios = ca_ratios(cloud, index, 64);

  // crease points: labeled sharp by the generator; flat points: non-edge far
  // from both crease and rim (CA has no rim concept, rims stay planar anyway)
  double crease_min = 1.0, flat_max = 0.0;
  std::size_t crease_n = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    // skip the crease ends where the crease meets the open rim
    if (cloud.labels[i] == 1 && std::abs(cloud.points[i].y()) < 16.0) {
      crease_min = std::min(crease_min, ratios[i]);
      ++crease_n;
    }
  }
  // sample deep-interior flat points: distance to the crease plane beyond the
  // CA neighborhood reach (~sqrt(64/pi) spacings) but away from rims
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const double dist_crease = std::hypot(p.x(), p.z()) / std::sqrt(2.0);
    if (cloud.labels[i] == 0 && dist_crease > 8.0 && std::abs(p.y()) < 18.0) {
      flat_max = std::max(flat_max, ratios[i]);
    }
  }
  REQUIRE(crease_n > 10);
  CHECK(crease_min > 0.08);
  CHECK(flat_max < 0.025);
}

TEST_CASE("ratios live in [0, 1/3] and respond monotonically to the threshold") {
  PointCloud cloud = gaussian_blob(2000, 6);
  for (int i = 0; i < 500; ++i) cloud.points.emplace_back(0.002 * i, 7.0, 0.0);  // mixed content
  KnnIndex index(cloud);
  std::vector<double> ratios = ca_ratios(cloud, index, 32);
  for (double r : ratios) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 / 3 + 1e-12);
  }

  std::size_t prev = cloud.size() + 1;
  for (int step = 1; step <= 20; ++step) {
    CaConfig config;
    config.k = 32;
    config.threshold = 0.3 * step / 20.0;
    std::vector<std::uint8_t> preds = ca_classify(cloud, index, config);
    std::size_t fired = 0;
    for (auto p : preds) fired += p;
    CHECK(fired <= prev);
    prev = fired;
  }
}

TEST_CASE("the ratio is rigid-motion invariant") {
  PointCloud cloud = random_cloud(600, 8, 2.0);
  KnnIndex index(cloud);
  std::vector<double> base = ca_ratios(cloud, index, 32);

  const Eigen::Matrix3d rot = random_rotation(9);
  PointCloud moved;
  for (const auto& p : cloud.points) moved.points.push_back(rot * p + Vec3(4, -1, 2));
  KnnIndex moved_index(moved);
  std::vector<double> turned = ca_ratios(moved, moved_index, 32);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(base[i] - turned[i]) < 1e-9);
}

TEST_CASE("invalid configurations are rejected") {
  CaConfig config;
  config.k = 2;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.k = 64;
  config.threshold = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.threshold = 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  PointCloud tiny = random_cloud(10, 10);
  KnnIndex index(tiny);
  CaConfig big;
  big.k = 64;
  CHECK_THROWS_AS(ca_classify(tiny, index, big), std::invalid_argument);
}
