#pragma once

#include <cstdint>
#include <vector>

#include "edgekit/types.hpp"

namespace edgekit {

// Squared Euclidean distance, written as plain scalar arithmetic so every
// caller evaluates the identical expression (ordering decisions depend on it).
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

// Exact k-nearest-neighbor index over a point cloud (axis-aligned kd-tree).
// Queries return the exact k nearest by Euclidean distance, sorted by
// ascending distance with ties broken by ascending point index; the query
// point itself is always the first result. Immutable after construction, so
// concurrent queries from many threads are safe.
class KnnIndex {
 public:
  explicit KnnIndex(const PointCloud& cloud);

  std::size_t size() const { return points_.size(); }

  // k nearest to cloud point `point_index` (self included). Throws
  // std::invalid_argument when k is 0 or exceeds the point count.
  std::vector<std::uint32_t> query(std::size_t point_index, std::size_t k) const;
  void query(std::size_t point_index, std::size_t k, std::vector<std::uint32_t>& out) const;

  // k nearest to an arbitrary position.
  void query_position(const Vec3& pos, std::size_t k, std::vector<std::uint32_t>& out) const;

  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    double split = 0;
    std::int32_t axis = -1;  // -1 marks a leaf
    std::uint32_t left = 0;  // child node ids, or [begin,end) into order_ for leaves
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;  // permutation of point ids, partitioned by the tree
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace edgekit
