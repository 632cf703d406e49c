#pragma once
#include <array>
#include <vector>

#include "layoutkit/geom/vec.hpp"

namespace layoutkit::geom {

// Plane { x : normal . x = offset }, normal kept unit length.
struct Plane {
  Vec3 normal{0, 0, 1};
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return dot(normal, p) - offset; }
  Vec3 project(const Vec3& p) const { return p - normal * signed_distance(p); }
  Vec3 origin() const { return normal * offset; }

  // Deterministic in-plane orthonormal basis (t1, t2) with t1 x t2 = normal.
  std::array<Vec3, 2> basis() const {
    Vec3 axis{1, 0, 0};
    double ax = std::abs(normal.x), ay = std::abs(normal.y), az = std::abs(normal.z);
    if (ay <= ax && ay <= az) axis = {0, 1, 0};
    else if (az <= ax && az <= ay) axis = {0, 0, 1};
    Vec3 t1 = normalized(cross(normal, axis));
    Vec3 t2 = cross(normal, t1);
    return {t1, t2};
  }

  Vec2 to_plane(const Vec3& p, const std::array<Vec3, 2>& b) const {
    Vec3 r = p - origin();
    return {dot(r, b[0]), dot(r, b[1])};
  }
  Vec3 to_world(const Vec2& q, const std::array<Vec3, 2>& b) const {
    return origin() + b[0] * q.x + b[1] * q.y;
  }
};

// Total-least-squares plane through points. Orientation: majority agreement
// with reference_normals when given, otherwise the normal points from the
// centroid toward the world origin. Throws on < 3 points or collinear input.
Plane fit_plane(const std::vector<Vec3>& points,
                const std::vector<Vec3>& reference_normals = {});

// Smallest/largest eigenpairs of a symmetric 3x3 matrix (row-major upper
// triangle a00,a01,a02,a11,a12,a22), via cyclic Jacobi sweeps.
struct SymEigen3 {
  std::array<double, 3> values;   // ascending
  std::array<Vec3, 3> vectors;    // matching columns, orthonormal
};
SymEigen3 sym_eigen3(double a00, double a01, double a02, double a11, double a12, double a22);

}  // namespace layoutkit::geom
