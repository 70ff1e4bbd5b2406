#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgekit {

using Vec3 = Eigen::Vector3d;

// Point classes. Input label 3 (smooth-edge convention) is folded into
// NonEdge at parse time; anything else outside {0,1,2} is rejected.
enum class ClassCode : std::uint8_t {
  NonEdge = 0,
  SharpEdge = 1,
  Boundary = 2,
};

inline constexpr int kNumClasses = 3;

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<std::uint8_t> labels;  // empty, or exactly one entry per point

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }
};

// Thrown by parsers; message carries a byte or line location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validates the PointCloud invariants, throws std::invalid_argument otherwise.
void validate(const PointCloud& cloud);

}  // namespace edgekit
