#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "layoutkit/geom/vec.hpp"
#include "layoutkit/io/semantic.hpp"

namespace layoutkit::io {

// Triangle mesh with per-vertex semantic labels. Loading welds duplicate
// vertices (1e-6) and drops zero-area triangles.
struct LabeledMesh {
  std::vector<geom::Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<SemanticClass> vertex_labels;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  geom::Vec3 triangle_normal(std::size_t t) const;
  double triangle_area(std::size_t t) const;
  geom::Vec3 triangle_centroid(std::size_t t) const;
};

// Binary little-endian PLY with vertex properties x,y,z:float32 and
// label:uint8, and a face vertex_indices list. Faces with more than three
// vertices are fan-triangulated on load.
LabeledMesh load_labeled_mesh(const std::string& path);
void write_labeled_mesh(const LabeledMesh& mesh, const std::string& path);

// Weld duplicate vertices and drop degenerate triangles in place.
// Returns the number of dropped triangles.
std::size_t cleanup_mesh(LabeledMesh& mesh, double weld_tol = 1e-6);

// Vertex -> vertex adjacency and triangle -> triangle (shared edge) adjacency.
std::vector<std::vector<std::uint32_t>> vertex_adjacency(const LabeledMesh& mesh);
std::vector<std::array<std::int64_t, 3>> triangle_adjacency(const LabeledMesh& mesh);

}  // namespace layoutkit::io
