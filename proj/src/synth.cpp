#include "edgekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "edgekit/rng.hpp"

namespace edgekit {

namespace {

constexpr double kPi = std::numbers::pi;

struct Sample {
  Vec3 position;         // on-surface, pre-noise
  double dist_crease;    // analytic distance to the nearest crease line
  double dist_rim;       // analytic distance to the nearest open rim
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

constexpr double kFar = 1e30;

// Jitter-grid sampler over a [0,w]x[0,h] parametric rectangle.
template <typename Emit>
void sample_rect(double w, double h, double spacing, Rng& rng, Emit&& emit) {
  const int nx = std::max(1, static_cast<int>(std::lround(w / spacing)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / spacing)));
  const double sx = w / nx, sy = h / ny;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      emit((i + uniform(rng, 0.0, 1.0)) * sx, (j + uniform(rng, 0.0, 1.0)) * sy);
}

double dist_to_segment_2d(double u, double v, double len) {
  // distance of (u,v) to the segment {(0,t) : t in [0,len]}
  const double t = std::clamp(v, 0.0, len);
  return std::sqrt(u * u + (v - t) * (v - t));
}

void sample_plane(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  const double s = spec.size, h = spec.mean_spacing();
  sample_rect(s, s, h, rng, [&](double u, double v) {
    out.push_back({Vec3(u - s / 2, v - s / 2, 0.0), kFar, kFar});
  });
}

void sample_halfplane(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  const double w = spec.size, h2 = spec.size / 2, h = spec.mean_spacing();
  sample_rect(w, h2, h, rng, [&](double u, double v) {
    const double rim = std::min({u, w - u, v, h2 - v});
    out.push_back({Vec3(u - w / 2, v - h2 / 2, 0.0), kFar, rim});
  });
}

void sample_wedge(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  // Crease along the y axis; each face is length(size) x width(5/12 size),
  // tilted so the faces meet at the requested dihedral angle.
  const double len = spec.size, width = spec.size * 5.0 / 12.0;
  const double h = spec.mean_spacing();
  const double phi = 0.5 * spec.angle_deg * kPi / 180.0;
  const Vec3 dir_a(std::cos(phi), 0.0, std::sin(phi));
  const Vec3 dir_b(std::cos(phi), 0.0, -std::sin(phi));
  for (const Vec3& dir : {dir_a, dir_b}) {
    sample_rect(width, len, h, rng, [&](double t, double y) {
      // crease is the segment x=z=0, y in [-len/2, len/2]
      const double crease = dist_to_segment_2d(t, y, len);
      const double rim = std::min({width - t, y, len - y});
      out.push_back({t * dir + Vec3(0, y - len / 2, 0), crease, rim});
    });
  }
}

void sample_box(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  // Cuboid size x 0.8 size x 0.6 size centered at the origin; closed surface,
  // the 12 edges are creases.
  const double a = spec.size, b = 0.8 * spec.size, c = 0.6 * spec.size;
  const double h = spec.mean_spacing();
  struct Face {
    Vec3 origin, du, dv;
    double w, hgt;
  };
  const Vec3 o(-a / 2, -b / 2, -c / 2);
  const Face faces[6] = {
      {o, Vec3::UnitX(), Vec3::UnitY(), a, b},                       // z = -c/2
      {o + Vec3(0, 0, c), Vec3::UnitX(), Vec3::UnitY(), a, b},       // z = +c/2
      {o, Vec3::UnitX(), Vec3::UnitZ(), a, c},                       // y = -b/2
      {o + Vec3(0, b, 0), Vec3::UnitX(), Vec3::UnitZ(), a, c},       // y = +b/2
      {o, Vec3::UnitY(), Vec3::UnitZ(), b, c},                       // x = -a/2
      {o + Vec3(a, 0, 0), Vec3::UnitY(), Vec3::UnitZ(), b, c},       // x = +a/2
  };
  for (const Face& f : faces) {
    sample_rect(f.w, f.hgt, h, rng, [&](double u, double v) {
      const double crease = std::min({u, f.w - u, v, f.hgt - v});
      out.push_back({f.origin + u * f.du + v * f.dv, crease, kFar});
    });
  }
}

void sample_disk(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  const double r = spec.radius, h = spec.mean_spacing();
  sample_rect(2 * r, 2 * r, h, rng, [&](double u, double v) {
    const double x = u - r, y = v - r;
    const double rho = std::sqrt(x * x + y * y);
    if (rho > r) return;
    out.push_back({Vec3(x, y, 0.0), kFar, r - rho});
  });
}

void sample_dome(const SceneSpec& spec, Rng& rng, std::vector<Sample>& out) {
  // Spherical cap with rim radius `radius` on a sphere of radius 1.6x that;
  // one curved rim, smooth everywhere else.
  const double r = spec.radius;
  const double R = 1.6 * r;
  const double z_rim = std::sqrt(R * R - r * r);
  const double area = 2 * kPi * R * (R - z_rim);
  const std::size_t n = static_cast<std::size_t>(std::lround(area * spec.density));
  const double theta_rim = std::asin(r / R);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = uniform(rng, z_rim, R);  // area-uniform on the cap
    const double phi = uniform(rng, 0.0, 2 * kPi);
    const double rho = std::sqrt(std::max(0.0, R * R - z * z));
    const Vec3 p(rho * std::cos(phi), rho * std::sin(phi), z);
    const double theta = std::acos(std::clamp(z / R, -1.0, 1.0));
    const double rim = 2 * R * std::sin(std::abs(theta_rim - theta) / 2);  // chord distance
    out.push_back({p, kFar, rim});
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (density <= 0) throw std::invalid_argument("density must be positive");
  if (noise_sigma < 0) throw std::invalid_argument("noise sigma must be nonnegative");
  if (outlier_fraction < 0 || outlier_fraction >= 0.1)
    throw std::invalid_argument("outlier fraction must lie in [0, 0.1)");
  if (label_epsilon <= 0) throw std::invalid_argument("label epsilon must be positive");
  if (size <= 0 || radius <= 0) throw std::invalid_argument("extent must be positive");
  if (angle_deg <= 0 || angle_deg >= 180)
    throw std::invalid_argument("wedge angle must lie in (0, 180) degrees");
}

double SceneSpec::mean_spacing() const { return 1.0 / std::sqrt(density); }

PrimitiveKind primitive_from_string(const std::string& name) {
  if (name == "plane") return PrimitiveKind::Plane;
  if (name == "wedge") return PrimitiveKind::Wedge;
  if (name == "box") return PrimitiveKind::Box;
  if (name == "open-disk" || name == "disk") return PrimitiveKind::OpenDisk;
  if (name == "curved-sheet" || name == "dome") return PrimitiveKind::CurvedSheet;
  if (name == "half-plane" || name == "plate") return PrimitiveKind::HalfPlane;
  throw std::invalid_argument("unknown primitive '" + name + "'");
}

std::string to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Plane: return "plane";
    case PrimitiveKind::Wedge: return "wedge";
    case PrimitiveKind::Box: return "box";
    case PrimitiveKind::OpenDisk: return "open-disk";
    case PrimitiveKind::CurvedSheet: return "curved-sheet";
    case PrimitiveKind::HalfPlane: return "half-plane";
  }
  return "?";
}

PointCloud generate(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, 0xA11CE));

  std::vector<Sample> samples;
  switch (spec.kind) {
    case PrimitiveKind::Plane: sample_plane(spec, rng, samples); break;
    case PrimitiveKind::Wedge: sample_wedge(spec, rng, samples); break;
    case PrimitiveKind::Box: sample_box(spec, rng, samples); break;
    case PrimitiveKind::OpenDisk: sample_disk(spec, rng, samples); break;
    case PrimitiveKind::CurvedSheet: sample_dome(spec, rng, samples); break;
    case PrimitiveKind::HalfPlane: sample_halfplane(spec, rng, samples); break;
  }
  if (samples.empty()) throw std::invalid_argument("scene produced no points");

  const double h = spec.mean_spacing();
  const double eps = spec.label_epsilon * h;

  PointCloud cloud;
  cloud.points.reserve(samples.size());
  cloud.labels.reserve(samples.size());
  std::normal_distribution<double> gauss(0.0, spec.noise_sigma * h);
  for (const Sample& s : samples) {
    // sharp-edge takes precedence over boundary where both are within reach
    std::uint8_t label = 0;
    if (s.dist_crease <= eps) label = 1;
    else if (spec.label_boundaries && s.dist_rim <= eps) label = 2;
    Vec3 p = s.position;
    if (spec.noise_sigma > 0) p += Vec3(gauss(rng), gauss(rng), gauss(rng));
    cloud.points.push_back(p);
    cloud.labels.push_back(label);
  }

  if (spec.outlier_fraction > 0) {
    const std::size_t n_out =
        static_cast<std::size_t>(std::lround(spec.outlier_fraction * static_cast<double>(samples.size())));
    Vec3 lo = cloud.points.front(), hi = lo;
    for (const auto& p : cloud.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec3 margin = 0.15 * (hi - lo) + Vec3::Constant(4 * h);
    lo -= margin;
    hi += margin;
    for (std::size_t i = 0; i < n_out; ++i) {
      cloud.points.push_back(Vec3(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()),
                                  uniform(rng, lo.z(), hi.z())));
      cloud.labels.push_back(0);
    }
  }
  return cloud;
}

std::array<std::uint64_t, 3> count_labels(const PointCloud& cloud) {
  std::array<std::uint64_t, 3> counts{};
  for (auto l : cloud.labels) ++counts[l];
  return counts;
}

SuiteProfile profile_from_string(const std::string& name) {
  if (name == "default" || name == "default-like") return SuiteProfile::DefaultLike;
  if (name == "defaultpp" || name == "defaultpp-like") return SuiteProfile::DefaultppLike;
  throw std::invalid_argument("unknown profile '" + name + "' (default|defaultpp)");
}

std::string to_string(SuiteProfile profile) {
  return profile == SuiteProfile::DefaultLike ? "default" : "defaultpp";
}

namespace {

// Merges primitives into one scene with enough spacing that neighborhoods of
// one object never reach another.
PointCloud compose(const std::vector<SceneSpec>& parts, std::uint64_t seed) {
  PointCloud merged;
  double cursor = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    PointCloud part = generate(parts[i], derive_seed(seed, 0xC0 + i));
    Vec3 lo = part.points.front(), hi = lo;
    for (const auto& p : part.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double gap = 40 * parts[i].mean_spacing();
    const Vec3 shift(cursor - lo.x(), 0, 0);
    for (auto& p : part.points) p += shift;
    cursor += (hi.x() - lo.x()) + gap;
    merged.points.insert(merged.points.end(), part.points.begin(), part.points.end());
    merged.labels.insert(merged.labels.end(), part.labels.begin(), part.labels.end());
  }
  return merged;
}

SceneSpec box_spec(double size, double noise, double outliers = 0.0) {
  SceneSpec s;
  s.kind = PrimitiveKind::Box;
  s.size = size;
  s.noise_sigma = noise;
  s.outlier_fraction = outliers;
  return s;
}

SceneSpec wedge_spec(double size, double angle, double noise) {
  SceneSpec s;
  s.kind = PrimitiveKind::Wedge;
  s.size = size;
  s.angle_deg = angle;
  s.noise_sigma = noise;
  return s;
}

SceneSpec disk_spec(double radius, double noise) {
  SceneSpec s;
  s.kind = PrimitiveKind::OpenDisk;
  s.radius = radius;
  s.noise_sigma = noise;
  return s;
}

SceneSpec dome_spec(double radius, double noise) {
  SceneSpec s;
  s.kind = PrimitiveKind::CurvedSheet;
  s.radius = radius;
  s.noise_sigma = noise;
  return s;
}

SceneSpec plane_spec(double size, double noise) {
  SceneSpec s;
  s.kind = PrimitiveKind::Plane;
  s.size = size;
  s.noise_sigma = noise;
  return s;
}

SceneSpec plate_spec(double size, double noise) {
  SceneSpec s;
  s.kind = PrimitiveKind::HalfPlane;
  s.size = size;
  s.noise_sigma = noise;
  return s;
}

void strip_boundary_labels(PointCloud& cloud) {
  for (auto& l : cloud.labels)
    if (l == 2) l = 0;
}

}  // namespace

Suite generate_suite(SuiteProfile profile, std::uint64_t seed) {
  Suite suite;
  suite.profile = profile;
  suite.seed = seed;

  struct TrainScene {
    std::string name;
    SceneSpec spec;
  };
  std::vector<TrainScene> train_scenes;
  std::vector<std::pair<std::string, std::vector<SceneSpec>>> eval_scenes;

  if (profile == SuiteProfile::DefaultppLike) {
    train_scenes = {
        {"box_60_clean", box_spec(60, 0.0)},
        {"box_65_n010", box_spec(65, 0.10)},
        {"box_70_n020", box_spec(70, 0.20)},
        {"box_62_outliers", box_spec(62, 0.05, 0.003)},
        {"box_68_n015", box_spec(68, 0.15)},
        {"box_72_clean", box_spec(72, 0.0)},
        {"box_75_n005", box_spec(75, 0.05)},
        {"wedge_60_clean", wedge_spec(48, 60, 0.0)},
        {"wedge_120_n020", wedge_spec(48, 120, 0.20)},
        {"disk_r22_n010", disk_spec(22, 0.10)},
        {"dome_r16_clean", dome_spec(16, 0.0)},
    };
    eval_scenes = {
        {"eval_mix_clean",
         {box_spec(57, 0.0), wedge_spec(44, 75, 0.0), disk_spec(20, 0.0), dome_spec(15, 0.0)}},
        {"eval_mix_n010",
         {box_spec(63, 0.10), wedge_spec(44, 100, 0.10), disk_spec(24, 0.10), dome_spec(17, 0.10)}},
        {"eval_mix_n020",
         {box_spec(59, 0.20), wedge_spec(44, 85, 0.20), disk_spec(18, 0.20), dome_spec(13, 0.20),
          plate_spec(20, 0.20)}},
        {"eval_mix_wide",
         {box_spec(66, 0.0), wedge_spec(44, 135, 0.0), disk_spec(26, 0.0), dome_spec(19, 0.0),
          plate_spec(24, 0.0)}},
        {"eval_mix_n015",
         {box_spec(61, 0.15), wedge_spec(44, 65, 0.15), disk_spec(21, 0.15), dome_spec(16, 0.15)}},
    };
  } else {
    train_scenes = {
        {"box_58_clean", box_spec(58, 0.0)},
        {"box_64_n010", box_spec(64, 0.10)},
        {"box_70_n020", box_spec(70, 0.20)},
        {"wedge_70_clean", wedge_spec(48, 70, 0.0)},
        {"wedge_110_n015", wedge_spec(48, 110, 0.15)},
        {"plane_60_clean", plane_spec(60, 0.0)},
        {"plane_60_n020", plane_spec(60, 0.20)},
    };
    eval_scenes = {
        {"eval_mix_clean", {box_spec(62, 0.0), wedge_spec(44, 80, 0.0)}},
        {"eval_mix_n015", {box_spec(56, 0.15), wedge_spec(44, 115, 0.15)}},
    };
  }

  for (std::size_t i = 0; i < train_scenes.size(); ++i) {
    PointCloud cloud = generate(train_scenes[i].spec, derive_seed(seed, 0x1000 + i));
    if (profile == SuiteProfile::DefaultLike) strip_boundary_labels(cloud);
    suite.train.push_back({train_scenes[i].name, std::move(cloud)});
  }
  for (std::size_t i = 0; i < eval_scenes.size(); ++i) {
    PointCloud cloud = compose(eval_scenes[i].second, derive_seed(seed, 0x2000 + i));
    if (profile == SuiteProfile::DefaultLike) strip_boundary_labels(cloud);
    suite.eval.push_back({eval_scenes[i].first, std::move(cloud)});
  }

  for (const auto& nc : suite.train) {
    auto counts = count_labels(nc.cloud);
    for (int c = 0; c < 3; ++c) suite.train_class_counts[static_cast<std::size_t>(c)] += counts[static_cast<std::size_t>(c)];
  }

  // Validation protocol: 1000 per class, but only 100 boundary points.
  const std::array<std::size_t, 3> quota = {1000, 1000, 100};
  Rng rng(derive_seed(seed, 0x3000));
  for (std::uint8_t cls = 0; cls < 3; ++cls) {
    std::vector<ValidationRef> pool;
    for (std::uint32_t ci = 0; ci < suite.train.size(); ++ci) {
      const auto& labels = suite.train[ci].cloud.labels;
      for (std::uint32_t pi = 0; pi < labels.size(); ++pi)
        if (labels[pi] == cls) pool.push_back({ci, pi});
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t take = std::min(pool.size(), quota[cls]);
    suite.validation.insert(suite.validation.end(), pool.begin(), pool.begin() + static_cast<long>(take));
  }
  return suite;
}

}  // namespace edgekit
