#include "layoutkit/geom/plane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace layoutkit::geom {

SymEigen3 sym_eigen3(double a00, double a01, double a02, double a11, double a12, double a22) {
  double a[3][3] = {{a00, a01, a02}, {a01, a11, a12}, {a02, a12, a22}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-15 * (std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2]) + 1e-300)) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < 3; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
  SymEigen3 out;
  for (int i = 0; i < 3; ++i) {
    int j = order[i];
    out.values[i] = a[j][j];
    out.vectors[i] = {v[0][j], v[1][j], v[2][j]};
  }
  return out;
}

Plane fit_plane(const std::vector<Vec3>& points, const std::vector<Vec3>& reference_normals) {
  if (points.size() < 3) throw std::invalid_argument("fit_plane: need at least 3 points");

  Vec3 c{0, 0, 0};
  for (const Vec3& p : points) c += p;
  c = c / static_cast<double>(points.size());

  double a00 = 0, a01 = 0, a02 = 0, a11 = 0, a12 = 0, a22 = 0;
  for (const Vec3& p : points) {
    Vec3 r = p - c;
    a00 += r.x * r.x; a01 += r.x * r.y; a02 += r.x * r.z;
    a11 += r.y * r.y; a12 += r.y * r.z; a22 += r.z * r.z;
  }

  SymEigen3 eig = sym_eigen3(a00, a01, a02, a11, a12, a22);
  // Rank test: collinear input leaves the two smallest spreads at ~zero.
  if (eig.values[1] <= 1e-12 * std::max(eig.values[2], 1e-300))
    throw std::invalid_argument("fit_plane: points are collinear or coincident");

  Vec3 n = normalized(eig.vectors[0]);

  if (!reference_normals.empty()) {
    double agree = 0.0;
    for (const Vec3& r : reference_normals) agree += (dot(r, n) >= 0.0) ? 1.0 : -1.0;
    if (agree < 0.0) n = -n;
  } else {
    // Point from centroid toward the origin; break near-zero ties by sign.
    double toward = dot(n, -c);
    if (toward < 0.0) n = -n;
    else if (toward == 0.0) {
      if (n.z < 0 || (n.z == 0 && (n.y < 0 || (n.y == 0 && n.x < 0)))) n = -n;
    }
  }
  return Plane{n, dot(n, c)};
}

}  // namespace layoutkit::geom
