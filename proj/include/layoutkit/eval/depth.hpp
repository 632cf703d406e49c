#pragma once
#include <array>
#include <vector>

#include "layoutkit/geom/vec.hpp"
#include "layoutkit/io/camera.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::eval {

using Triangle = std::array<geom::Vec3, 3>;

// Depth in meters per pixel; <= 0 marks invalid (no surface hit).
using DepthMap = std::vector<float>;

// Z-buffer rasterization of the triangles into the frame's pinhole camera:
// perspective-correct z interpolation, coverage sampled at integer pixel
// coordinates, no backface culling. Rows are rasterized in parallel.
DepthMap render_depth(const std::vector<Triangle>& tris, const io::CameraFrame& frame,
                      ExecMode mode = ExecMode::Parallel);

// Independent per-pixel ray-casting reference.
DepthMap render_depth_raycast(const std::vector<Triangle>& tris, const io::CameraFrame& frame,
                              ExecMode mode = ExecMode::Parallel);

// Fan-triangulated faces (convex or near-convex rings).
std::vector<Triangle> triangulate_faces(const std::vector<std::vector<geom::Vec3>>& faces);

// Percentage of pixels valid in both maps whose difference is within tau
// centimeters. Throws when no pixel is valid in both.
double depth_delta(const DepthMap& pred, const DepthMap& gt, double tau_cm);

}  // namespace layoutkit::eval
