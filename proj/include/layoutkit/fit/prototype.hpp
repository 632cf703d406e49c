#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "layoutkit/geom/distance.hpp"
#include "layoutkit/geom/plane.hpp"
#include "layoutkit/geom/polygon.hpp"

namespace layoutkit::fit {

constexpr double kFitTol = 1e-4;  // epsilon_fit: post-projection plane residual bound

struct FitConfig {
  double tau_inter = 0.5;    // meters, empty-space gate
  double tau_merge = 0.10;   // meters, vertex merge / RDP tolerance
  double tau_extend = 0.002; // crossings per cm^2, wall extension gate
  double tau_connect = 0.3;  // meters, connectivity gate
  double step_size = 0.02;   // meters per step before backtracking
  int n_iters = 300;
  int merge_period = 50;
  double w_prox = 1.0, w_empty = 1.0, w_connect = 1.0, w_simple = 1.0;

  double alpha_hull = 0.15;        // concave hull radius for initialization
  int max_skeleton_points = 20000; // L_prox subsample bound
  int ransac_trials = 64;
  int min_polygon_points = 10;
  std::uint64_t seed = 1;

  void validate() const;  // all thresholds positive
};

// Shared vertex pool plus planar semantic polygons: the optimization state.
struct PrototypeSet {
  std::vector<geom::Vec3> vertices;
  std::vector<geom::Polygon3> polygons;

  geom::PolygonView view(std::size_t poly,
                         std::vector<geom::Vec3>& scratch) const {
    scratch = geom::ring_points(polygons[poly], vertices);
    return {scratch, polygons[poly].plane};
  }
};

// Owning polygons per pool vertex (polygons whose ring contains it),
// ascending polygon index.
std::vector<std::vector<int>> vertex_owners(const PrototypeSet& set);

// Projection of one vertex onto its owners: one plane -> orthogonal drop,
// two -> plane intersection line, three or more -> least-squares point.
// Carries the Jacobians needed to chain loss gradients through the
// projection, with plane normals parameterized in their tangent basis.
struct PlaneParamJac {
  int poly = -1;
  geom::Vec3 d_a, d_b, d_d;  // dq/d(tangent1), dq/d(tangent2), dq/d(offset)
};
struct VertexProjection {
  geom::Vec3 position;
  std::array<geom::Vec3, 3> jac_rows;  // dq/dx as rows
  std::vector<PlaneParamJac> planes;
};
VertexProjection project_vertex(const geom::Vec3& x, const std::vector<int>& owner_polys,
                                const PrototypeSet& set, bool with_jacobians);

// Hard projection of every pool vertex onto its owning planes.
void project_all_vertices(PrototypeSet& set);

// Max |signed distance| of any vertex to any of its owning planes.
double max_plane_residual(const PrototypeSet& set);

// Drop polygons with fewer than 3 distinct ring ids, collapse consecutive
// duplicate ids, and remove unreferenced pool vertices.
void compact(PrototypeSet& set);

// Every ring simple in its plane coordinates.
bool all_rings_simple(const PrototypeSet& set);

double polygon_area_3d(const PrototypeSet& set, std::size_t poly);
geom::Vec3 polygon_centroid(const PrototypeSet& set, std::size_t poly);

// Checkpoint: vertex pool + polygons (ring ids, plane, class) as JSON.
void write_prototype(const PrototypeSet& set, const std::string& path);
PrototypeSet load_prototype(const std::string& path);

}  // namespace layoutkit::fit
