#include "edgekit/knn.hpp"

#include <algorithm>
#include <numeric>

namespace edgekit {

namespace {

constexpr std::uint32_t kLeafSize = 16;

struct Candidate {
  double dist;
  std::uint32_t index;
};

// Lexicographic (distance, index) order; the total order behind every
// tie-break guarantee in this module.
inline bool cand_less(const Candidate& a, const Candidate& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.index < b.index;
}

// Fixed-capacity max-heap of the k best candidates seen so far.
class BestK {
 public:
  BestK(std::size_t k, std::vector<Candidate>& storage) : k_(k), heap_(storage) {
    heap_.clear();
    heap_.reserve(k);
  }

  bool full() const { return heap_.size() == k_; }
  const Candidate& worst() const { return heap_.front(); }

  void offer(const Candidate& c) {
    if (!full()) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), cand_less);
    } else if (cand_less(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), cand_less);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), cand_less);
    }
  }

  void finish(std::vector<std::uint32_t>& out) {
    std::sort_heap(heap_.begin(), heap_.end(), cand_less);
    out.resize(heap_.size());
    for (std::size_t i = 0; i < heap_.size(); ++i) out[i] = heap_[i].index;
  }

 private:
  std::size_t k_;
  std::vector<Candidate>& heap_;
};

}  // namespace

KnnIndex::KnnIndex(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) throw std::invalid_argument("cannot index an empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t KnnIndex::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.left = begin;
    node.right = end;
    nodes_.push_back(node);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  // Split on the widest axis at the median; comparator ties resolved by point
  // index so the structure is deterministic for a given input order.
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  Vec3 extent = hi - lo;
  int axis = 0;
  if (extent.y() > extent.x()) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;

  std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     double ca = points_[a][axis], cb = points_[b][axis];
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });

  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  nodes_.push_back(node);
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size() - 1);
  std::uint32_t left = build(begin, mid);
  std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

// Depth-first search with the incremental box-distance bound: `bound` is a
// lower bound on the squared distance from the query to the node's region,
// maintained per axis as the far side of each split is entered.
void KnnIndex::query_position(const Vec3& pos, std::size_t k,
                              std::vector<std::uint32_t>& out) const {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (k > points_.size())
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds point count " +
                                std::to_string(points_.size()));

  thread_local std::vector<Candidate> storage;
  BestK best(k, storage);

  Vec3 axis_excess = Vec3::Zero();

  // Recursive lambda keeps the per-axis offset state on the call stack.
  auto descend = [&](auto&& self, std::uint32_t node_id, double bound) -> void {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.left; i < node.right; ++i) {
        std::uint32_t idx = order_[i];
        best.offer({squared_distance(pos, points_[idx]), idx});
      }
      return;
    }
    const double delta = pos[node.axis] - node.split;
    const std::uint32_t near = delta < 0 ? node.left : node.right;
    const std::uint32_t far = delta < 0 ? node.right : node.left;
    self(self, near, bound);

    const double prev = axis_excess[node.axis];
    const double far_bound = bound - prev * prev + delta * delta;
    // <= (not <): an equidistant point with a smaller index may still win.
    if (!best.full() || far_bound <= best.worst().dist) {
      axis_excess[node.axis] = delta;
      self(self, far, far_bound);
      axis_excess[node.axis] = prev;
    }
  };
  descend(descend, root_, 0.0);

  best.finish(out);
}

void KnnIndex::query(std::size_t point_index, std::size_t k,
                     std::vector<std::uint32_t>& out) const {
  if (point_index >= points_.size()) throw std::invalid_argument("point index out of range");
  query_position(points_[point_index], k, out);
}

std::vector<std::uint32_t> KnnIndex::query(std::size_t point_index, std::size_t k) const {
  std::vector<std::uint32_t> out;
  query(point_index, k, out);
  return out;
}

}  // namespace edgekit
