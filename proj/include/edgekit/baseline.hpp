#pragma once

#include <vector>

#include "edgekit/knn.hpp"
#include "edgekit/types.hpp"

namespace edgekit {

// Covariance-analysis threshold baseline: a point is sharp-edge when the
// surface-variation ratio sigma3/(sigma1+sigma2+sigma3) of its k-neighborhood
// covariance exceeds the threshold. Binary by construction; never predicts
// boundary. Paper-tuned presets: 0.025 (Default-style data), 0.08 (ABC-style).
struct CaConfig {
  int k = 64;
  double threshold = 0.025;

  void validate() const;
};

// The ratio per point, in [0, 1/3]; defined as 0 when all eigenvalues vanish.
std::vector<double> ca_ratios(const PointCloud& cloud, const KnnIndex& index, int k,
                              int threads = 0);

std::vector<std::uint8_t> ca_classify(const PointCloud& cloud, const KnnIndex& index,
                                      const CaConfig& config, int threads = 0);

}  // namespace edgekit
