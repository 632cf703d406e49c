#pragma once
#include <cstddef>
#include <vector>

#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

// Static 3D kd-tree over a fixed point set. Nearest queries are exact and
// break distance ties toward the lower point index.
class KdTree3 {
 public:
  KdTree3() = default;
  explicit KdTree3(const std::vector<Vec3>& points) { build(points); }

  void build(const std::vector<Vec3>& points);
  bool empty() const { return nodes_.empty(); }

  int nearest(const Vec3& q) const;
  // Indices of the k nearest points, sorted by (distance, index).
  std::vector<int> knearest(const Vec3& q, int k) const;
  // All points within radius r of q (inclusive), sorted by index.
  std::vector<int> radius(const Vec3& q, double r) const;

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes_;
  std::vector<Vec3> pts_;
  int root_ = -1;

  int build_recurse(std::vector<int>& ids, int lo, int hi, int depth);
};

}  // namespace layoutkit::geom
