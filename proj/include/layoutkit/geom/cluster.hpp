#pragma once
#include <vector>

#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

constexpr int kDbscanNoise = -1;

// Density clustering of 2D points. Returns a cluster label per point
// (kDbscanNoise for noise); labels are assigned in first-core-point order.
std::vector<int> dbscan_2d(const std::vector<Vec2>& points, double eps, int min_pts);

// Local outlier factor over 3D points with k neighbors. Points with a score
// above the threshold are outliers. When the set is too small for k
// neighbors, every point is kept.
std::vector<double> lof_scores(const std::vector<Vec3>& points, int k);
std::vector<char> lof_filter(const std::vector<Vec3>& points, int k, double threshold);

}  // namespace layoutkit::geom
