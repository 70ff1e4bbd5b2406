#pragma once

#include <cstdint>
#include <vector>

#include "edgekit/types.hpp"

namespace edgekit {

// One-vs-rest counts for a designated positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct Scores {
  double precision = 0;
  double recall = 0;
  double mcc = 0;
  double f1 = 0;
  double accuracy = 0;
  double iou = 0;
};

ConfusionMatrix confusion(const std::vector<std::uint8_t>& predictions,
                          const std::vector<std::uint8_t>& labels,
                          std::uint8_t positive_class);

// Every 0/0 ratio is defined as 0 so aggregates stay well defined on clouds
// lacking a class.
Scores scores(const ConfusionMatrix& cm);

// Per-metric median across clouds; midpoint convention for even counts.
Scores median_scores(std::vector<Scores> per_cloud);

}  // namespace edgekit
