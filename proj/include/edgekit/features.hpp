#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgekit/knn.hpp"
#include "edgekit/types.hpp"

namespace edgekit {

inline constexpr int kFeatureDim = 12;

// Column layout of one per-scale feature row.
enum FeatureColumn : int {
  kSigmaUpper1 = 0,
  kSigmaUpper2 = 1,
  kSigmaUpper3 = 2,
  kSigmaLower1 = 3,
  kSigmaLower2 = 4,
  kSigmaLower3 = 5,
  kDPerp = 6,
  kDPar = 7,
  kSPerp = 8,
  kSPar = 9,
  kCPerp = 10,
  kCPar = 11,
};

inline constexpr std::uint16_t kMaskSigma = 0x003F;  // both subset sigma triples
inline constexpr std::uint16_t kMaskD = 0x00C0;
inline constexpr std::uint16_t kMaskS = 0x0300;
inline constexpr std::uint16_t kMaskC = 0x0C00;
inline constexpr std::uint16_t kMaskAll = 0x0FFF;

// Accepts "all", group names joined by ',' or '+' ("d,s,c"), or "no-<group>"
// ("no-sigma"). Groups: sigma, d, s, c. Throws std::invalid_argument.
std::uint16_t parse_feature_mask(const std::string& text);
std::string feature_mask_to_string(std::uint16_t mask);

// Local plane fit of one neighborhood: centroid and descending eigenvalues of
// the population covariance, the partition normal (recomputed over the
// floor(k/2) points nearest the centroid, sign-canonicalized), and the
// normalization factor 2/(sqrt(s1)+sqrt(s2)).
struct NeighborhoodFrame {
  Vec3 centroid = Vec3::Zero();
  Vec3 sigma = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double scale_factor = 0.0;
  bool degenerate = true;  // sigma1 + sigma2 == 0
};

struct SubsetStats {
  Vec3 sigma_upper = Vec3::Zero();
  Vec3 sigma_lower = Vec3::Zero();
  double d_perp = 0.0;
  double d_par = 0.0;
};

struct ScaleConfig {
  std::vector<int> scales = {128, 64, 32, 16};  // strictly descending, each >= 4
  std::uint16_t feature_mask = kMaskAll;

  void validate() const;
  int max_scale() const { return scales.empty() ? 0 : scales.front(); }
};

// Flattened per-point multi-scale feature rows: count * m * 12 doubles,
// row-major per point with rows ordered from the largest scale down.
struct FeatureSet {
  std::vector<int> scales;
  std::uint16_t feature_mask = kMaskAll;
  std::size_t count = 0;
  std::vector<double> data;

  int m() const { return static_cast<int>(scales.size()); }
  std::size_t row_width() const { return scales.size() * kFeatureDim; }
  const double* point(std::size_t i) const { return data.data() + i * row_width(); }
  double* point(std::size_t i) { return data.data() + i * row_width(); }
};

// Descending eigenvalues (clamped at 0) of a symmetric PSD 3x3 matrix; when
// `vectors` is given, its columns match the eigenvalue order.
void symmetric_eigen3(const Eigen::Matrix3d& m, Vec3& evals_desc,
                      Eigen::Matrix3d* vectors = nullptr);

NeighborhoodFrame neighborhood_frame(std::span<const Vec3> neighborhood, const Vec3& query);

// scale_factor * (p - centroid) for every neighborhood point. Throws on a
// degenerate frame.
std::vector<Vec3> normalize_neighborhood(std::span<const Vec3> neighborhood,
                                         const NeighborhoodFrame& frame);

// Splits centered points by the sign of <p, normal>; dot >= 0 goes upper.
void partition_by_plane(std::span<const Vec3> normalized, const Vec3& normal,
                        std::vector<Vec3>& upper, std::vector<Vec3>& lower);

// Per-subset descending covariance eigenvalues plus the normal/tangential
// split of the between-centroid vector. A subset with fewer than 2 points
// contributes zero sigma and an origin centroid.
SubsetStats subset_stats(const std::vector<Vec3>& upper, const std::vector<Vec3>& lower,
                         const Vec3& normal);

// Offset of the query from its neighborhood centroid in normalized
// coordinates, split into (s_perp, s_par).
std::pair<double, double> self_offset(const Vec3& query, const NeighborhoodFrame& frame);

// Offset between the sub-scale centroid and the centroid of the largest
// scale's leftover points, in raw coordinates rescaled by the largest scale's
// factor and decomposed against its normal. k equal to the full neighborhood
// size returns (0,0).
std::pair<double, double> cross_scale_offset(std::span<const Vec3> k0_neighborhood,
                                             std::size_t k, const NeighborhoodFrame& k0_frame);

FeatureSet extract_features(const PointCloud& cloud, const KnnIndex& index,
                            const ScaleConfig& config, int threads = 0);

// BNDF container: magic, version, n, m, scale list, mask, float32 rows.
// Stored single-precision; a save/load/save cycle is byte-identical.
void save_features(const FeatureSet& features, const std::string& path);
FeatureSet load_features(const std::string& path);

}  // namespace edgekit
