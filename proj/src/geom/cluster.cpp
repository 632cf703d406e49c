#include "layoutkit/geom/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "layoutkit/geom/kdtree.hpp"

namespace layoutkit::geom {

namespace {

// Uniform grid neighbor index for 2D range queries.
struct Grid2 {
  double cell;
  std::map<std::pair<long long, long long>, std::vector<int>> cells;

  explicit Grid2(const std::vector<Vec2>& pts, double cell_size) : cell(cell_size) {
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) cells[key(pts[i])].push_back(i);
  }
  std::pair<long long, long long> key(const Vec2& p) const {
    return {static_cast<long long>(std::floor(p.x / cell)),
            static_cast<long long>(std::floor(p.y / cell))};
  }
  void neighbors(const std::vector<Vec2>& pts, const Vec2& q, double r,
                 std::vector<int>& out) const {
    out.clear();
    double r2 = r * r;
    auto [cx, cy] = key(q);
    long long reach = static_cast<long long>(std::ceil(r / cell));
    for (long long dx = -reach; dx <= reach; ++dx) {
      for (long long dy = -reach; dy <= reach; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (int i : it->second)
          if (norm2(pts[i] - q) <= r2) out.push_back(i);
      }
    }
    std::sort(out.begin(), out.end());
  }
};

}  // namespace

std::vector<int> dbscan_2d(const std::vector<Vec2>& points, double eps, int min_pts) {
  const int n = static_cast<int>(points.size());
  std::vector<int> labels(n, -2);  // -2 unvisited, -1 noise
  if (n == 0) return labels;
  Grid2 grid(points, std::max(eps, 1e-9));

  int next_cluster = 0;
  std::vector<int> nbrs, nbrs2;
  for (int i = 0; i < n; ++i) {
    if (labels[i] != -2) continue;
    grid.neighbors(points, points[i], eps, nbrs);
    if (static_cast<int>(nbrs.size()) < min_pts) {
      labels[i] = kDbscanNoise;
      continue;
    }
    int cluster = next_cluster++;
    labels[i] = cluster;
    std::queue<int> queue;
    for (int j : nbrs)
      if (j != i) queue.push(j);
    while (!queue.empty()) {
      int j = queue.front();
      queue.pop();
      if (labels[j] == kDbscanNoise) labels[j] = cluster;
      if (labels[j] != -2) continue;
      labels[j] = cluster;
      grid.neighbors(points, points[j], eps, nbrs2);
      if (static_cast<int>(nbrs2.size()) >= min_pts) {
        for (int q : nbrs2)
          if (labels[q] == -2 || labels[q] == kDbscanNoise) queue.push(q);
      }
    }
  }
  return labels;
}

std::vector<double> lof_scores(const std::vector<Vec3>& points, int k) {
  const int n = static_cast<int>(points.size());
  std::vector<double> scores(n, 1.0);
  if (n <= k) return scores;

  KdTree3 tree(points);
  std::vector<std::vector<int>> knn(n);
  std::vector<double> kdist(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto ids = tree.knearest(points[i], k + 1);  // includes the point itself
    ids.erase(std::remove(ids.begin(), ids.end(), i), ids.end());
    if (static_cast<int>(ids.size()) > k) ids.resize(k);
    knn[i] = std::move(ids);
    kdist[i] = knn[i].empty() ? 0.0 : norm(points[knn[i].back()] - points[i]);
  }

  std::vector<double> lrd(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double reach_sum = 0.0;
    for (int j : knn[i]) reach_sum += std::max(kdist[j], norm(points[j] - points[i]));
    lrd[i] = knn[i].empty() || reach_sum <= 0.0
                 ? std::numeric_limits<double>::infinity()
                 : static_cast<double>(knn[i].size()) / reach_sum;
  }
  for (int i = 0; i < n; ++i) {
    if (knn[i].empty()) continue;
    double acc = 0.0;
    for (int j : knn[i]) acc += lrd[j];
    scores[i] = lrd[i] > 0.0 && std::isfinite(lrd[i])
                    ? acc / (static_cast<double>(knn[i].size()) * lrd[i])
                    : 1.0;
  }
  return scores;
}

std::vector<char> lof_filter(const std::vector<Vec3>& points, int k, double threshold) {
  std::vector<double> scores = lof_scores(points, k);
  std::vector<char> keep(points.size(), 1);
  for (std::size_t i = 0; i < points.size(); ++i) keep[i] = scores[i] <= threshold ? 1 : 0;
  return keep;
}

}  // namespace layoutkit::geom
