#include "edgekit/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgekit/binio.hpp"
#include "edgekit/io.hpp"
#include "edgekit/parallel.hpp"

namespace edgekit {

void ScaleConfig::validate() const {
  if (scales.empty()) throw std::invalid_argument("scale list is empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 4) throw std::invalid_argument("every scale must be >= 4");
    if (i > 0 && scales[i] >= scales[i - 1])
      throw std::invalid_argument("scales must be strictly descending");
  }
  if ((feature_mask & kMaskAll) == 0) throw std::invalid_argument("feature mask selects no column");
}

std::uint16_t parse_feature_mask(const std::string& text) {
  if (text.empty() || text == "all") return kMaskAll;
  auto group = [](const std::string& name) -> std::uint16_t {
    if (name == "sigma") return kMaskSigma;
    if (name == "d") return kMaskD;
    if (name == "s") return kMaskS;
    if (name == "c") return kMaskC;
    throw std::invalid_argument("unknown feature group '" + name + "' (sigma|d|s|c)");
  };
  if (text.rfind("no-", 0) == 0)
    return static_cast<std::uint16_t>(kMaskAll & ~group(text.substr(3)));
  std::uint16_t mask = 0;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, text.find('+') != std::string::npos ? '+' : ',')) {
    if (!token.empty()) mask |= group(token);
  }
  if (mask == 0) throw std::invalid_argument("feature mask '" + text + "' selects nothing");
  return mask;
}

std::string feature_mask_to_string(std::uint16_t mask) {
  if ((mask & kMaskAll) == kMaskAll) return "all";
  std::string out;
  auto add = [&](const char* name) {
    if (!out.empty()) out += ',';
    out += name;
  };
  if (mask & kMaskSigma) add("sigma");
  if (mask & kMaskD) add("d");
  if (mask & kMaskS) add("s");
  if (mask & kMaskC) add("c");
  return out.empty() ? "none" : out;
}

void symmetric_eigen3(const Eigen::Matrix3d& m, Vec3& evals_desc, Eigen::Matrix3d* vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  if (vectors)
    solver.compute(m);
  else
    solver.compute(m, Eigen::EigenvaluesOnly);
  // Eigen returns ascending order; covariance eigenvalues are reported
  // descending and clamped at zero (tiny negatives are roundoff).
  for (int i = 0; i < 3; ++i) evals_desc[i] = std::max(0.0, solver.eigenvalues()[2 - i]);
  if (vectors)
    for (int i = 0; i < 3; ++i) vectors->col(i) = solver.eigenvectors().col(2 - i);
}

namespace {

Vec3 centroid_of(std::span<const Vec3> pts) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : pts) sum += p;
  return sum / static_cast<double>(pts.size());
}

Eigen::Matrix3d population_covariance(std::span<const Vec3> pts, const Vec3& mean) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    Vec3 d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  return cov / static_cast<double>(pts.size());
}

constexpr double kDegenerateEps = 0.0;   // sigma1 + sigma2 must be strictly positive
constexpr double kSignEps = 1e-12;

}  // namespace

NeighborhoodFrame neighborhood_frame(std::span<const Vec3> neighborhood, const Vec3& query) {
  if (neighborhood.size() < 4)
    throw std::invalid_argument("neighborhood needs at least 4 points");

  NeighborhoodFrame frame;
  frame.centroid = centroid_of(neighborhood);
  Eigen::Matrix3d cov = population_covariance(neighborhood, frame.centroid);
  symmetric_eigen3(cov, frame.sigma);

  const double spread = std::sqrt(frame.sigma[0]) + std::sqrt(frame.sigma[1]);
  if (spread <= kDegenerateEps) {
    frame.degenerate = true;
    return frame;
  }
  frame.degenerate = false;
  frame.scale_factor = 2.0 / spread;

  // The partition normal comes from the floor(k/2) points nearest the
  // centroid; the full-neighborhood normal is unstable near outliers.
  const std::size_t half = neighborhood.size() / 2;
  thread_local std::vector<std::pair<double, std::uint32_t>> by_dist;
  by_dist.clear();
  by_dist.reserve(neighborhood.size());
  for (std::uint32_t i = 0; i < neighborhood.size(); ++i)
    by_dist.emplace_back(squared_distance(neighborhood[i], frame.centroid), i);
  std::nth_element(by_dist.begin(), by_dist.begin() + static_cast<long>(half) - 1, by_dist.end());

  Vec3 half_mean = Vec3::Zero();
  for (std::size_t i = 0; i < half; ++i) half_mean += neighborhood[by_dist[i].second];
  half_mean /= static_cast<double>(half);
  Eigen::Matrix3d half_cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < half; ++i) {
    Vec3 d = neighborhood[by_dist[i].second] - half_mean;
    half_cov.noalias() += d * d.transpose();
  }
  half_cov /= static_cast<double>(half);

  Vec3 evals;
  Eigen::Matrix3d evecs;
  symmetric_eigen3(half_cov, evals, &evecs);
  Vec3 normal = evecs.col(2);  // eigenvector of the smallest eigenvalue
  normal.normalize();

  // Sign canonicalization: make <query - centroid, n> nonnegative; when that
  // offset is (numerically) in-plane, make the largest-magnitude component
  // positive instead.
  const double toward_query = normal.dot(query - frame.centroid);
  if (toward_query < -kSignEps) {
    normal = -normal;
  } else if (std::abs(toward_query) <= kSignEps) {
    int major = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(normal[i]) > std::abs(normal[major])) major = i;
    if (normal[major] < 0) normal = -normal;
  }
  frame.normal = normal;
  return frame;
}

std::vector<Vec3> normalize_neighborhood(std::span<const Vec3> neighborhood,
                                         const NeighborhoodFrame& frame) {
  if (frame.degenerate) throw std::invalid_argument("cannot normalize a degenerate neighborhood");
  std::vector<Vec3> out;
  out.reserve(neighborhood.size());
  for (const auto& p : neighborhood) out.push_back(frame.scale_factor * (p - frame.centroid));
  return out;
}

void partition_by_plane(std::span<const Vec3> normalized, const Vec3& normal,
                        std::vector<Vec3>& upper, std::vector<Vec3>& lower) {
  upper.clear();
  lower.clear();
  for (const auto& p : normalized) {
    if (p.dot(normal) >= 0)
      upper.push_back(p);
    else
      lower.push_back(p);
  }
}

SubsetStats subset_stats(const std::vector<Vec3>& upper, const std::vector<Vec3>& lower,
                         const Vec3& normal) {
  SubsetStats stats;
  Vec3 mean_upper = Vec3::Zero();
  Vec3 mean_lower = Vec3::Zero();
  if (upper.size() >= 2) {
    mean_upper = centroid_of(upper);
    symmetric_eigen3(population_covariance(upper, mean_upper), stats.sigma_upper);
  }
  if (lower.size() >= 2) {
    mean_lower = centroid_of(lower);
    symmetric_eigen3(population_covariance(lower, mean_lower), stats.sigma_lower);
  }
  const Vec3 between = mean_upper - mean_lower;
  stats.d_perp = between.dot(normal);
  stats.d_par = (between - stats.d_perp * normal).norm();
  return stats;
}

std::pair<double, double> self_offset(const Vec3& query, const NeighborhoodFrame& frame) {
  if (frame.degenerate) throw std::invalid_argument("degenerate frame in self_offset");
  const Vec3 q = frame.scale_factor * (query - frame.centroid);
  const double s_perp = q.dot(frame.normal);
  const double s_par = (q - s_perp * frame.normal).norm();
  return {s_perp, s_par};
}

std::pair<double, double> cross_scale_offset(std::span<const Vec3> k0_neighborhood,
                                             std::size_t k, const NeighborhoodFrame& k0_frame) {
  const std::size_t k0 = k0_neighborhood.size();
  if (k > k0) throw std::invalid_argument("sub-scale larger than the full neighborhood");
  if (k == k0) return {0.0, 0.0};  // empty set difference
  if (k0_frame.degenerate) return {0.0, 0.0};

  Vec3 sum_k = Vec3::Zero();
  for (std::size_t i = 0; i < k; ++i) sum_k += k0_neighborhood[i];
  Vec3 sum_rest = Vec3::Zero();
  for (std::size_t i = k; i < k0; ++i) sum_rest += k0_neighborhood[i];

  const Vec3 mean_k = sum_k / static_cast<double>(k);
  const Vec3 mean_rest = sum_rest / static_cast<double>(k0 - k);
  const Vec3 v = k0_frame.scale_factor * (mean_k - mean_rest);
  const double c_perp = v.dot(k0_frame.normal);
  const double c_par = (v - c_perp * k0_frame.normal).norm();
  return {c_perp, c_par};
}

FeatureSet extract_features(const PointCloud& cloud, const KnnIndex& index,
                            const ScaleConfig& config, int threads) {
  config.validate();
  const std::size_t n = cloud.size();
  if (static_cast<int>(n) < config.max_scale())
    throw std::invalid_argument("cloud smaller than the largest scale");

  FeatureSet fs;
  fs.scales = config.scales;
  fs.feature_mask = config.feature_mask;
  fs.count = n;
  const std::size_t width = fs.row_width();
  fs.data.assign(n * width, 0.0);

  const int m = fs.m();
  const std::size_t k0 = static_cast<std::size_t>(config.scales.front());

  parallel_chunks(n, 128, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> ids;
    std::vector<Vec3> neigh;
    std::vector<Vec3> normalized;
    std::vector<Vec3> upper, lower;
    neigh.reserve(k0);

    for (std::size_t i = begin; i < end; ++i) {
      index.query(i, k0, ids);
      neigh.clear();
      for (auto id : ids) neigh.push_back(cloud.points[id]);
      const Vec3& query = cloud.points[i];

      NeighborhoodFrame k0_frame;
      double* rows = fs.point(i);
      for (int s = 0; s < m; ++s) {
        const std::size_t k = static_cast<std::size_t>(config.scales[static_cast<std::size_t>(s)]);
        std::span<const Vec3> sub(neigh.data(), k);
        NeighborhoodFrame frame = neighborhood_frame(sub, query);
        if (s == 0) k0_frame = frame;
        double* row = rows + static_cast<std::size_t>(s) * kFeatureDim;
        if (frame.degenerate) continue;  // row stays all-zero

        normalized.clear();
        normalized.reserve(k);
        for (const auto& p : sub) normalized.push_back(frame.scale_factor * (p - frame.centroid));
        partition_by_plane(normalized, frame.normal, upper, lower);
        const SubsetStats ss = subset_stats(upper, lower, frame.normal);
        const auto [s_perp, s_par] = self_offset(query, frame);
        const auto [c_perp, c_par] = cross_scale_offset(std::span<const Vec3>(neigh), k, k0_frame);

        row[kSigmaUpper1] = ss.sigma_upper[0];
        row[kSigmaUpper2] = ss.sigma_upper[1];
        row[kSigmaUpper3] = ss.sigma_upper[2];
        row[kSigmaLower1] = ss.sigma_lower[0];
        row[kSigmaLower2] = ss.sigma_lower[1];
        row[kSigmaLower3] = ss.sigma_lower[2];
        row[kDPerp] = ss.d_perp;
        row[kDPar] = ss.d_par;
        row[kSPerp] = s_perp;
        row[kSPar] = s_par;
        row[kCPerp] = c_perp;
        row[kCPar] = c_par;
        for (int c = 0; c < kFeatureDim; ++c)
          if (!(config.feature_mask & (1u << c))) row[c] = 0.0;
      }
    }
  });

  return fs;
}

void save_features(const FeatureSet& features, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write("BNDF", 4);
  write_le<std::uint32_t>(os, 1);
  write_le<std::uint64_t>(os, features.count);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(features.scales.size()));
  for (int s : features.scales) write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  write_le<std::uint16_t>(os, features.feature_mask);
  for (double v : features.data) write_le<float>(os, static_cast<float>(v));
  atomic_write_file(path, os.str());
}

FeatureSet load_features(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "BNDF")
    throw ParseError("not a BNDF file: " + path);
  const auto version = read_le<std::uint32_t>(is, "version");
  if (version != 1) throw ParseError("unsupported BNDF version " + std::to_string(version));

  FeatureSet fs;
  fs.count = read_le<std::uint64_t>(is, "point count");
  const auto m = read_le<std::uint32_t>(is, "scale count");
  if (m == 0 || m > 64) throw ParseError("implausible scale count in " + path);
  fs.scales.resize(m);
  for (auto& s : fs.scales) s = static_cast<int>(read_le<std::uint32_t>(is, "scale"));
  fs.feature_mask = read_le<std::uint16_t>(is, "feature mask");

  fs.data.resize(fs.count * fs.row_width());
  for (auto& v : fs.data) v = static_cast<double>(read_le<float>(is, "feature value"));
  return fs;
}

}  // namespace edgekit
