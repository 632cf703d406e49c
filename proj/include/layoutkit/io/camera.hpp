#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "layoutkit/geom/vec.hpp"
#include "layoutkit/io/image.hpp"
#include "layoutkit/io/semantic.hpp"

namespace layoutkit::io {

// Rigid transform taking camera-frame points to world-frame points.
struct RigidTransform {
  std::array<geom::Vec3, 3> rotation_rows{geom::Vec3{1, 0, 0}, geom::Vec3{0, 1, 0},
                                          geom::Vec3{0, 0, 1}};
  geom::Vec3 translation{0, 0, 0};

  geom::Vec3 apply(const geom::Vec3& p) const {
    return {geom::dot(rotation_rows[0], p) + translation.x,
            geom::dot(rotation_rows[1], p) + translation.y,
            geom::dot(rotation_rows[2], p) + translation.z};
  }
  geom::Vec3 apply_inverse(const geom::Vec3& p) const {
    geom::Vec3 d = p - translation;
    // rotation is orthonormal, inverse = transpose
    return {rotation_rows[0].x * d.x + rotation_rows[1].x * d.y + rotation_rows[2].x * d.z,
            rotation_rows[0].y * d.x + rotation_rows[1].y * d.y + rotation_rows[2].y * d.z,
            rotation_rows[0].z * d.x + rotation_rows[1].z * d.y + rotation_rows[2].z * d.z};
  }
  bool is_rigid(double tol = 1e-6) const;
};

// Pinhole camera: looks down +z of the camera frame, x right, y down.
// Pixel (u, v) samples the ray through image coordinates exactly (u, v).
struct CameraFrame {
  int id = 0;
  int width = 0;
  int height = 0;
  double fx = 1, fy = 1, cx = 0, cy = 0;
  RigidTransform world_from_camera;
  DepthImage depth;                    // meters encoded as millimeters
  std::optional<LabelImage> pixel_labels;

  geom::Vec3 center() const { return world_from_camera.translation; }

  // World-frame point for a pixel at z-depth meters.
  geom::Vec3 unproject(double u, double v, double depth_m) const {
    geom::Vec3 cam{(u - cx) / fx * depth_m, (v - cy) / fy * depth_m, depth_m};
    return world_from_camera.apply(cam);
  }
  // Projects a world point; returns false when behind the camera.
  bool project(const geom::Vec3& world, double& u, double& v, double& depth_m) const {
    geom::Vec3 cam = world_from_camera.apply_inverse(world);
    if (cam.z <= 0) return false;
    u = fx * cam.x / cam.z + cx;
    v = fy * cam.y / cam.z + cy;
    depth_m = cam.z;
    return true;
  }
  double depth_at(int u, int v) const {
    if (!depth.in_bounds(u, v)) return 0.0;
    return depth.at(u, v) / 1000.0;
  }
};

// cameras.json: array of {id, width, height, fx, fy, cx, cy,
// world_from_camera: 16 floats row-major 4x4}. Depth and label images live
// in sibling depth/ and labels/ directories as <id>.png.
std::vector<CameraFrame> load_cameras(const std::string& json_path);
void write_cameras(const std::vector<CameraFrame>& frames, const std::string& json_path);

// Loads depth (and labels when present) for frames from a scene directory.
void load_frame_images(std::vector<CameraFrame>& frames, const std::string& scene_dir);

}  // namespace layoutkit::io
