#include "layoutkit/eval/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "layoutkit/log.hpp"

namespace layoutkit::eval {

using geom::Vec2;
using geom::Vec3;

namespace {

constexpr double kNearClip = 1e-3;
constexpr float kInvalid = -1.0f;

struct ScreenTri {
  Vec2 p[3];
  double inv_z[3];
  double min_x, max_x, min_y, max_y;
};

void emit_screen_tri(const Vec3 cam[3], const io::CameraFrame& f, std::vector<ScreenTri>& out) {
  ScreenTri st;
  for (int k = 0; k < 3; ++k) {
    st.p[k] = {f.fx * cam[k].x / cam[k].z + f.cx, f.fy * cam[k].y / cam[k].z + f.cy};
    st.inv_z[k] = 1.0 / cam[k].z;
  }
  st.min_x = std::min({st.p[0].x, st.p[1].x, st.p[2].x});
  st.max_x = std::max({st.p[0].x, st.p[1].x, st.p[2].x});
  st.min_y = std::min({st.p[0].y, st.p[1].y, st.p[2].y});
  st.max_y = std::max({st.p[0].y, st.p[1].y, st.p[2].y});
  out.push_back(st);
}

// Clip a camera-space triangle against z = near; yields 0..2 triangles.
void clip_near(const Vec3 cam[3], const io::CameraFrame& f, std::vector<ScreenTri>& out) {
  int inside[3], n_in = 0;
  for (int k = 0; k < 3; ++k) {
    inside[k] = cam[k].z > kNearClip;
    n_in += inside[k];
  }
  if (n_in == 0) return;
  if (n_in == 3) {
    emit_screen_tri(cam, f, out);
    return;
  }
  auto lerp_z = [&](const Vec3& a, const Vec3& b) {
    double t = (kNearClip - a.z) / (b.z - a.z);
    return a + (b - a) * t;
  };
  std::vector<Vec3> poly;
  for (int k = 0; k < 3; ++k) {
    const Vec3& cur = cam[k];
    const Vec3& nxt = cam[(k + 1) % 3];
    if (inside[k]) poly.push_back(cur);
    if (inside[k] != inside[(k + 1) % 3]) poly.push_back(lerp_z(cur, nxt));
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    Vec3 tri[3] = {poly[0], poly[k], poly[k + 1]};
    emit_screen_tri(tri, f, out);
  }
}

}  // namespace

DepthMap render_depth(const std::vector<Triangle>& tris, const io::CameraFrame& frame,
                      ExecMode mode) {
  DepthMap depth(static_cast<std::size_t>(frame.width) * frame.height, kInvalid);

  std::vector<ScreenTri> screen;
  screen.reserve(tris.size());
  for (const Triangle& tri : tris) {
    Vec3 cam[3];
    for (int k = 0; k < 3; ++k) cam[k] = frame.world_from_camera.apply_inverse(tri[k]);
    clip_near(cam, frame, screen);
  }

  // Rows rasterize independently: deterministic and race-free.
  indexed_for(mode, frame.height, [&](std::size_t row) {
    const double y = static_cast<double>(row);
    float* out = depth.data() + row * frame.width;
    for (const ScreenTri& st : screen) {
      if (y < st.min_y - 1e-12 || y > st.max_y + 1e-12) continue;
      double area = geom::cross(st.p[1] - st.p[0], st.p[2] - st.p[0]);
      if (std::abs(area) < 1e-18) continue;
      double sign = area > 0 ? 1.0 : -1.0;
      double abs_area = std::abs(area);
      int x0 = std::max(0, static_cast<int>(std::ceil(st.min_x - 1e-9)));
      int x1 = std::min(frame.width - 1, static_cast<int>(std::floor(st.max_x + 1e-9)));
      for (int x = x0; x <= x1; ++x) {
        Vec2 s{static_cast<double>(x), y};
        double w0 = sign * geom::cross(st.p[1] - s, st.p[2] - s);
        double w1 = sign * geom::cross(st.p[2] - s, st.p[0] - s);
        double w2 = sign * geom::cross(st.p[0] - s, st.p[1] - s);
        double slack = -1e-12 * abs_area;
        if (w0 < slack || w1 < slack || w2 < slack) continue;
        double l0 = w0 / abs_area, l1 = w1 / abs_area, l2 = w2 / abs_area;
        double inv_z = l0 * st.inv_z[0] + l1 * st.inv_z[1] + l2 * st.inv_z[2];
        if (inv_z <= 0) continue;
        float z = static_cast<float>(1.0 / inv_z);
        if (out[x] <= 0.0f || z < out[x]) out[x] = z;
      }
    }
  });
  return depth;
}

DepthMap render_depth_raycast(const std::vector<Triangle>& tris, const io::CameraFrame& frame,
                              ExecMode mode) {
  DepthMap depth(static_cast<std::size_t>(frame.width) * frame.height, kInvalid);
  const Vec3 origin = frame.center();

  indexed_for(mode, static_cast<std::int64_t>(depth.size()), [&](std::size_t i) {
    int u = static_cast<int>(i) % frame.width;
    int v = static_cast<int>(i) / frame.width;
    Vec3 dir_cam{(u - frame.cx) / frame.fx, (v - frame.cy) / frame.fy, 1.0};
    const auto& R = frame.world_from_camera.rotation_rows;
    Vec3 dir{geom::dot(R[0], dir_cam), geom::dot(R[1], dir_cam), geom::dot(R[2], dir_cam)};

    double best = std::numeric_limits<double>::infinity();
    for (const Triangle& tri : tris) {
      // Moller-Trumbore
      Vec3 e1 = tri[1] - tri[0];
      Vec3 e2 = tri[2] - tri[0];
      Vec3 pvec = geom::cross(dir, e2);
      double det = geom::dot(e1, pvec);
      if (std::abs(det) < 1e-14) continue;
      double inv_det = 1.0 / det;
      Vec3 tvec = origin - tri[0];
      double uu = geom::dot(tvec, pvec) * inv_det;
      if (uu < -1e-9 || uu > 1.0 + 1e-9) continue;
      Vec3 qvec = geom::cross(tvec, e1);
      double vv = geom::dot(dir, qvec) * inv_det;
      if (vv < -1e-9 || uu + vv > 1.0 + 1e-9) continue;
      double t = geom::dot(e2, qvec) * inv_det;
      if (t > kNearClip && t < best) best = t;
    }
    if (std::isfinite(best)) depth[i] = static_cast<float>(best);
  });
  return depth;
}

std::vector<Triangle> triangulate_faces(const std::vector<std::vector<Vec3>>& faces) {
  std::vector<Triangle> tris;
  for (const auto& ring : faces) {
    for (std::size_t k = 1; k + 1 < ring.size(); ++k)
      tris.push_back({ring[0], ring[k], ring[k + 1]});
  }
  return tris;
}

double depth_delta(const DepthMap& pred, const DepthMap& gt, double tau_cm) {
  if (pred.size() != gt.size())
    throw InputError("depth_delta: resolution mismatch");
  const double tau_m = tau_cm / 100.0;
  std::size_t n = 0, ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] <= 0.0f || gt[i] <= 0.0f) continue;
    ++n;
    if (std::abs(static_cast<double>(pred[i]) - gt[i]) <= tau_m) ++ok;
  }
  if (n == 0) throw InputError("depth_delta: no pixel valid in both maps");
  return 100.0 * static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace layoutkit::eval
