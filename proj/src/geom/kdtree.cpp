#include "layoutkit/geom/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace layoutkit::geom {

void KdTree3::build(const std::vector<Vec3>& points) {
  pts_ = points;
  nodes_.clear();
  nodes_.reserve(points.size());
  std::vector<int> ids(points.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  root_ = build_recurse(ids, 0, static_cast<int>(ids.size()), 0);
}

int KdTree3::build_recurse(std::vector<int>& ids, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  int axis = depth % 3;
  int mid = (lo + hi) / 2;
  std::nth_element(ids.begin() + lo, ids.begin() + mid, ids.begin() + hi, [&](int a, int b) {
    double va = pts_[a][axis], vb = pts_[b][axis];
    return va < vb || (va == vb && a < b);
  });
  int node = static_cast<int>(nodes_.size());
  nodes_.push_back({ids[mid], axis, -1, -1});
  int left = build_recurse(ids, lo, mid, depth + 1);
  int right = build_recurse(ids, mid + 1, hi, depth + 1);
  nodes_[node].left = left;
  nodes_[node].right = right;
  return node;
}

int KdTree3::nearest(const Vec3& q) const {
  if (root_ < 0) return -1;
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();

  auto visit = [&](auto&& self, int n) -> void {
    if (n < 0) return;
    const Node& node = nodes_[n];
    const Vec3& p = pts_[node.point];
    double d2 = norm2(q - p);
    if (d2 < best_d2 || (d2 == best_d2 && node.point < best)) {
      best_d2 = d2;
      best = node.point;
    }
    double delta = q[node.axis] - p[node.axis];
    int near_side = delta < 0 ? node.left : node.right;
    int far_side = delta < 0 ? node.right : node.left;
    self(self, near_side);
    if (delta * delta <= best_d2) self(self, far_side);
  };
  visit(visit, root_);
  return best;
}

std::vector<int> KdTree3::knearest(const Vec3& q, int k) const {
  using Entry = std::pair<double, int>;  // (dist2, index), max-heap
  std::priority_queue<Entry> heap;
  auto visit = [&](auto&& self, int n) -> void {
    if (n < 0) return;
    const Node& node = nodes_[n];
    const Vec3& p = pts_[node.point];
    double d2 = norm2(q - p);
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace(d2, node.point);
    } else if (d2 < heap.top().first ||
               (d2 == heap.top().first && node.point < heap.top().second)) {
      heap.pop();
      heap.emplace(d2, node.point);
    }
    double delta = q[node.axis] - p[node.axis];
    int near_side = delta < 0 ? node.left : node.right;
    int far_side = delta < 0 ? node.right : node.left;
    self(self, near_side);
    if (static_cast<int>(heap.size()) < k || delta * delta <= heap.top().first)
      self(self, far_side);
  };
  visit(visit, root_);
  std::vector<Entry> entries;
  while (!heap.empty()) {
    entries.push_back(heap.top());
    heap.pop();
  }
  std::sort(entries.begin(), entries.end());
  std::vector<int> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) out.push_back(e.second);
  return out;
}

std::vector<int> KdTree3::radius(const Vec3& q, double r) const {
  std::vector<int> out;
  double r2 = r * r;
  auto visit = [&](auto&& self, int n) -> void {
    if (n < 0) return;
    const Node& node = nodes_[n];
    const Vec3& p = pts_[node.point];
    if (norm2(q - p) <= r2) out.push_back(node.point);
    double delta = q[node.axis] - p[node.axis];
    if (delta <= r) self(self, node.left);
    if (-delta <= r) self(self, node.right);
  };
  visit(visit, root_);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace layoutkit::geom
