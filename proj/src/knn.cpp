#include "renyi/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace renyi {

KdTree::KdTree(RowMat points, std::size_t leaf_size) : points_(std::move(points)) {
  order_.resize(static_cast<std::size_t>(points_.rows()));
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * order_.size() / std::max<std::size_t>(leaf_size, 1) + 2);
  if (!order_.empty()) build(0, order_.size(), std::max<std::size_t>(leaf_size, 1));
}

std::size_t KdTree::build(std::size_t begin, std::size_t end, std::size_t leaf_size) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size) return id;
  const int d = static_cast<int>(points_.cols());
  int axis = 0;
  double widest = -1.0;
  for (int a = 0; a < d; ++a) {
    double lo = points_(order_[begin], a), hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, points_(order_[i], a));
      hi = std::max(hi, points_(order_[i], a));
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t x, std::size_t y) { return points_(x, axis) < points_(y, axis); });
  const double split = points_(order_[mid], axis);
  const std::size_t left = build(begin, mid, leaf_size);
  const std::size_t right = build(mid, end, leaf_size);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::kth_distance(const double* query, std::size_t k, std::size_t exclude) const {
  if (k == 0 || k > size() - (exclude < size() ? 1 : 0)) throw InvalidArgument("kth_distance: k out of range");
  const Eigen::Index d = points_.cols();
  std::priority_queue<double> best;  // k smallest squared distances, max on top
  auto worst = [&] { return best.size() < k ? std::numeric_limits<double>::infinity() : best.top(); };

  auto visit = [&](auto&& self, std::size_t id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t p = order_[i];
        if (p == exclude) continue;
        double dist = 0.0;
        for (Eigen::Index a = 0; a < d; ++a) {
          const double diff = points_(p, a) - query[a];
          dist += diff * diff;
        }
        if (dist < worst()) {
          best.push(dist);
          if (best.size() > k) best.pop();
        }
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    const std::size_t near = delta < 0.0 ? node.left : node.right;
    const std::size_t far = delta < 0.0 ? node.right : node.left;
    self(self, near);
    if (delta * delta < worst()) self(self, far);
  };
  visit(visit, 0);
  return std::sqrt(best.top());
}

}  // namespace renyi
