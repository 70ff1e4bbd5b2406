#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edgekit/types.hpp"

namespace edgekit {

enum class PrimitiveKind {
  Plane,        // finite square sheet; carries no labels by contract
  Wedge,        // two rectangular faces meeting at a crease (open rims)
  Box,          // closed cuboid surface, creases only
  OpenDisk,     // flat disk, circular rim
  CurvedSheet,  // spherical dome with one circular rim of the given radius
  HalfPlane,    // flat rectangular plate, straight rims
};

PrimitiveKind primitive_from_string(const std::string& name);
std::string to_string(PrimitiveKind kind);

struct SceneSpec {
  PrimitiveKind kind = PrimitiveKind::Plane;
  double size = 60.0;       // main extent in scene units (see each sampler)
  double angle_deg = 90.0;  // wedge dihedral angle
  double radius = 20.0;     // disk / dome rim radius
  double density = 1.0;     // points per unit surface area
  double noise_sigma = 0.0;       // Gaussian displacement, x mean spacing
  double outlier_fraction = 0.0;  // in [0, 0.1)
  double label_epsilon = 1.0;     // labeling tolerance, x mean spacing
  bool label_boundaries = true;   // false reproduces datasets without boundary labels

  void validate() const;
  double mean_spacing() const;
};

// Deterministic for (spec, seed). Labels come from the pre-noise surface
// position: sharp-edge within epsilon of a crease line, else boundary within
// epsilon of an open rim, else non-edge. Outliers are injected off-surface
// and labeled non-edge.
PointCloud generate(const SceneSpec& spec, std::uint64_t seed);

std::array<std::uint64_t, 3> count_labels(const PointCloud& cloud);

enum class SuiteProfile { DefaultLike, DefaultppLike };

SuiteProfile profile_from_string(const std::string& name);
std::string to_string(SuiteProfile profile);

struct NamedCloud {
  std::string name;
  PointCloud cloud;
};

struct ValidationRef {
  std::uint32_t cloud = 0;  // index into Suite::train
  std::uint32_t point = 0;
};

struct Suite {
  SuiteProfile profile;
  std::uint64_t seed = 0;
  std::vector<NamedCloud> train;
  std::vector<NamedCloud> eval;  // composite scenes, disjoint from training
  std::vector<ValidationRef> validation;
  std::array<std::uint64_t, 3> train_class_counts{};
};

// Training/validation/evaluation sets mirroring the two dataset styles:
// default-like has no boundary annotations; defaultpp-like pools classes at
// roughly 94.5% / 5-7% / 0.3-0.6% and samples validation as 1000 non-edge +
// 1000 sharp-edge + 100 boundary points from the training clouds.
Suite generate_suite(SuiteProfile profile, std::uint64_t seed);

}  // namespace edgekit
