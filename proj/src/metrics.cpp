#include "edgekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgekit {

ConfusionMatrix confusion(const std::vector<std::uint8_t>& predictions,
                          const std::vector<std::uint8_t>& labels,
                          std::uint8_t positive_class) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("prediction/label length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == positive_class;
    const bool true_pos = labels[i] == positive_class;
    if (pred_pos && true_pos) ++cm.tp;
    else if (pred_pos && !true_pos) ++cm.fp;
    else if (!pred_pos && true_pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

}  // namespace

Scores scores(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);

  Scores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  s.accuracy = ratio(tp + tn, tp + fp + fn + tn);
  s.iou = ratio(tp, tp + fp + fn);
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  s.mcc = ratio(tp * tn - fp * fn, denom);
  return s;
}

Scores median_scores(std::vector<Scores> per_cloud) {
  if (per_cloud.empty()) throw std::invalid_argument("no per-cloud scores to aggregate");
  auto median_of = [&](double Scores::* field) {
    std::vector<double> v;
    v.reserve(per_cloud.size());
    for (const auto& s : per_cloud) v.push_back(s.*field);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  Scores m;
  m.precision = median_of(&Scores::precision);
  m.recall = median_of(&Scores::recall);
  m.mcc = median_of(&Scores::mcc);
  m.f1 = median_of(&Scores::f1);
  m.accuracy = median_of(&Scores::accuracy);
  m.iou = median_of(&Scores::iou);
  return m;
}

}  // namespace edgekit
