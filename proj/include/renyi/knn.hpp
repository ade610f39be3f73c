#pragma once

#include <cstddef>
#include <vector>

#include "renyi/sampling.hpp"

namespace renyi {

/// Static k-d tree over the rows of a point matrix (Euclidean metric).
class KdTree {
 public:
  explicit KdTree(RowMat points, std::size_t leaf_size = 12);

  /// Distance to the k-th nearest point, ignoring the point with index
  /// `exclude` (pass npos to keep all points).
  double kth_distance(const double* query, std::size_t k, std::size_t exclude = npos) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    int axis = -1;           // -1 for leaves
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end, std::size_t leaf_size);

  RowMat points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace renyi
