#pragma once
#include <span>
#include <vector>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/io/observation.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::fit {

// Everything the losses need, evaluated at one parameter point: vertex
// positions hard-projected onto their owning planes, with the projection
// Jacobians retained so gradients can flow to both vertex positions and
// plane parameters.
struct FitState {
  const PrototypeSet* set = nullptr;
  std::vector<std::vector<int>> owners;
  std::vector<VertexProjection> proj;
  std::vector<geom::Vec3> positions;                  // projected pool positions
  std::vector<std::vector<geom::Vec3>> rings;         // per polygon, projected
  std::vector<std::array<geom::Vec3, 2>> bases;       // per polygon plane basis
  std::vector<std::vector<geom::Vec2>> rings2;        // rings in plane coords

  static FitState build(const PrototypeSet& set, bool with_jacobians);
  geom::PolygonView view(std::size_t p) const {
    return {rings[p], set->polygons[p].plane};
  }
};

// Gradient wrt free variables: pool vertex positions and per-polygon plane
// parameters (tangent coords a, b around the current normal, offset d).
struct FitGradient {
  std::vector<geom::Vec3> d_vertex;
  std::vector<std::array<double, 3>> d_plane;  // (a, b, d)

  void resize(const PrototypeSet& set);
  double max_block_norm() const;
};

// Per-loss evaluation. When grad is non-null, contributions are accumulated
// through the projection chain rule. Parallel mode maps items into indexed
// slots and reduces in order, so results are bit-identical to serial.
double loss_prox(const FitState& state, std::span<const geom::Vec3> skeleton_points,
                 FitGradient* grad, ExecMode mode = ExecMode::Parallel);
double loss_empty(const FitState& state, std::span<const io::ObservationSegment> segments,
                  double tau_inter, FitGradient* grad, ExecMode mode = ExecMode::Parallel);
double loss_connect(const FitState& state, double tau_connect, FitGradient* grad,
                    ExecMode mode = ExecMode::Parallel);
double loss_simple(const FitState& state, FitGradient* grad, ExecMode mode = ExecMode::Parallel);

struct LossBreakdown {
  double prox = 0, empty = 0, connect = 0, simple = 0;
  double weighted_total(const FitConfig& cfg) const {
    return cfg.w_prox * prox + cfg.w_empty * empty + cfg.w_connect * connect +
           cfg.w_simple * simple;
  }
};

LossBreakdown total_loss(const FitState& state, std::span<const geom::Vec3> skeleton_points,
                         std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                         FitGradient* grad, ExecMode mode = ExecMode::Parallel);

// Undirected pool-id edges present in more than one polygon ring.
std::vector<std::vector<char>> shared_edge_flags(const PrototypeSet& set);

}  // namespace layoutkit::fit
