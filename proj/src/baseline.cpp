#include "edgekit/baseline.hpp"

#include <stdexcept>

#include "edgekit/features.hpp"
#include "edgekit/parallel.hpp"

namespace edgekit {

void CaConfig::validate() const {
  if (k < 4) throw std::invalid_argument("CA neighborhood size must be >= 4");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("CA threshold must lie in (0,1)");
}

std::vector<double> ca_ratios(const PointCloud& cloud, const KnnIndex& index, int k,
                              int threads) {
  if (static_cast<std::size_t>(k) > cloud.size())
    throw std::invalid_argument("CA neighborhood larger than the cloud");
  std::vector<double> ratios(cloud.size(), 0.0);

  parallel_chunks(cloud.size(), 256, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> ids;
    for (std::size_t i = begin; i < end; ++i) {
      index.query(i, static_cast<std::size_t>(k), ids);
      Vec3 mean = Vec3::Zero();
      for (auto id : ids) mean += cloud.points[id];
      mean /= static_cast<double>(ids.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (auto id : ids) {
        Vec3 d = cloud.points[id] - mean;
        cov.noalias() += d * d.transpose();
      }
      cov /= static_cast<double>(ids.size());
      Vec3 sigma;
      symmetric_eigen3(cov, sigma);
      const double sum = sigma.sum();
      ratios[i] = sum > 0 ? sigma[2] / sum : 0.0;
    }
  });
  return ratios;
}

std::vector<std::uint8_t> ca_classify(const PointCloud& cloud, const KnnIndex& index,
                                      const CaConfig& config, int threads) {
  config.validate();
  const std::vector<double> ratios = ca_ratios(cloud, index, config.k, threads);
  std::vector<std::uint8_t> out(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i)
    out[i] = ratios[i] > config.threshold ? 1 : 0;
  return out;
}

}  // namespace edgekit
