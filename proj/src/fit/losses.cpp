#include "layoutkit/fit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace layoutkit::fit {

using geom::Vec2;
using geom::Vec3;

FitState FitState::build(const PrototypeSet& set, bool with_jacobians) {
  FitState st;
  st.set = &set;
  st.owners = vertex_owners(set);
  st.proj.resize(set.vertices.size());
  st.positions.resize(set.vertices.size());
  for (std::size_t v = 0; v < set.vertices.size(); ++v) {
    st.proj[v] = project_vertex(set.vertices[v], st.owners[v], set, with_jacobians);
    st.positions[v] = st.proj[v].position;
  }
  st.rings.resize(set.polygons.size());
  st.bases.resize(set.polygons.size());
  st.rings2.resize(set.polygons.size());
  for (std::size_t p = 0; p < set.polygons.size(); ++p) {
    const geom::Polygon3& poly = set.polygons[p];
    st.bases[p] = poly.plane.basis();
    st.rings[p].reserve(poly.ring.size());
    st.rings2[p].reserve(poly.ring.size());
    for (std::uint32_t v : poly.ring) {
      st.rings[p].push_back(st.positions[v]);
      st.rings2[p].push_back(poly.plane.to_plane(st.positions[v], st.bases[p]));
    }
  }
  return st;
}

void FitGradient::resize(const PrototypeSet& set) {
  d_vertex.assign(set.vertices.size(), Vec3{0, 0, 0});
  d_plane.assign(set.polygons.size(), {0, 0, 0});
}

double FitGradient::max_block_norm() const {
  double worst = 0.0;
  for (const Vec3& g : d_vertex) worst = std::max(worst, geom::norm(g));
  for (const auto& g : d_plane)
    worst = std::max(worst, std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]));
  return worst;
}

namespace {

constexpr double kGradTiny = 1e-12;

// One sparse gradient entry: either a projected-vertex gradient (kind 0,
// g is d/d x-tilde) or a plane-parameter gradient (kind 1, g = (da, db, dd)).
struct Entry {
  int kind = 0;
  int index = -1;
  Vec3 g;
};

struct Contribution {
  double value = 0.0;
  int n = 0;
  std::array<Entry, 4> fixed;
  std::vector<Entry> overflow;

  void add(int kind, int index, const Vec3& g) {
    if (n < static_cast<int>(fixed.size())) fixed[n++] = {kind, index, g};
    else overflow.push_back({kind, index, g});
  }
};

struct ClosestInfo {
  double dist = std::numeric_limits<double>::infinity();
  int feature = 0;  // 0 face, 1 edge, 2 vertex
  std::size_t edge_i = 0;
  double t = 0.0;
  Vec3 closest;
  double signed_dist = 0.0;
};

ClosestInfo closest_feature(const FitState& st, std::size_t p, const Vec3& q) {
  const geom::Polygon3& poly = st.set->polygons[p];
  const auto& ring = st.rings[p];
  const auto& ring2 = st.rings2[p];
  ClosestInfo out;
  if (ring.size() < 3) return out;

  double sd = poly.plane.signed_distance(q);
  Vec3 foot = q - poly.plane.normal * sd;
  Vec2 foot2 = poly.plane.to_plane(foot, st.bases[p]);
  if (geom::point_in_ring(foot2, ring2, 0.0)) {
    out.dist = std::abs(sd);
    out.feature = 0;
    out.closest = foot;
    out.signed_dist = sd;
    return out;
  }

  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = ring[i];
    const Vec3& b = ring[(i + 1) % n];
    Vec3 ab = b - a;
    double len2 = geom::norm2(ab);
    if (len2 < 1e-24) continue;
    double t = std::clamp(geom::dot(q - a, ab) / len2, 0.0, 1.0);
    Vec3 c = a + ab * t;
    double d = geom::norm(q - c);
    if (d < out.dist) {
      out.dist = d;
      out.closest = c;
      out.t = t;
      if (t <= 0.0) { out.feature = 2; out.edge_i = i; }
      else if (t >= 1.0) { out.feature = 2; out.edge_i = (i + 1) % n; }
      else { out.feature = 1; out.edge_i = i; }
    }
  }
  return out;
}

// Gradient entries for one realized point-to-polygon distance at query q.
// query_entry: optional kind-0 entry index for q itself (or -1 when q is
// fixed data). The direction u points from the surface toward q.
void add_distance_entries(const FitState& st, std::size_t p, const Vec3& q,
                          const ClosestInfo& info, int query_vertex, Contribution& c) {
  if (info.dist < kGradTiny) return;
  const geom::Polygon3& poly = st.set->polygons[p];
  if (info.feature == 0) {
    double sign = info.signed_dist >= 0 ? 1.0 : -1.0;
    if (query_vertex >= 0) c.add(0, query_vertex, poly.plane.normal * sign);
    const auto& b = st.bases[p];
    c.add(1, static_cast<int>(p),
          Vec3{sign * geom::dot(b[0], q), sign * geom::dot(b[1], q), -sign});
    return;
  }
  Vec3 u = (q - info.closest) / info.dist;
  if (query_vertex >= 0) c.add(0, query_vertex, u);
  const auto& ring_ids = poly.ring;
  if (info.feature == 2) {
    c.add(0, static_cast<int>(ring_ids[info.edge_i]), -u);
  } else {
    std::size_t i = info.edge_i;
    std::size_t j = (i + 1) % ring_ids.size();
    c.add(0, static_cast<int>(ring_ids[i]), u * -(1.0 - info.t));
    c.add(0, static_cast<int>(ring_ids[j]), u * -info.t);
  }
}

// Ordered reduction of per-item contributions, then the projection chain
// rule folds projected-vertex gradients into vertex and plane gradients.
double reduce_contributions(const FitState& st, const std::vector<Contribution>& items,
                            FitGradient* grad) {
  double total = 0.0;
  for (const Contribution& c : items) total += c.value;
  if (!grad) return total;

  std::vector<Vec3> d_proj(st.positions.size(), Vec3{0, 0, 0});
  auto apply = [&](const Entry& e) {
    if (e.kind == 0) {
      d_proj[e.index] += e.g;
    } else {
      auto& acc = grad->d_plane[e.index];
      acc[0] += e.g.x;
      acc[1] += e.g.y;
      acc[2] += e.g.z;
    }
  };
  for (const Contribution& c : items) {
    for (int i = 0; i < c.n; ++i) apply(c.fixed[i]);
    for (const Entry& e : c.overflow) apply(e);
  }

  for (std::size_t v = 0; v < d_proj.size(); ++v) {
    const Vec3& g = d_proj[v];
    if (std::abs(g.x) + std::abs(g.y) + std::abs(g.z) == 0.0) continue;
    const VertexProjection& pr = st.proj[v];
    grad->d_vertex[v] += pr.jac_rows[0] * g.x + pr.jac_rows[1] * g.y + pr.jac_rows[2] * g.z;
    for (const PlaneParamJac& pj : pr.planes) {
      auto& acc = grad->d_plane[pj.poly];
      acc[0] += geom::dot(pj.d_a, g);
      acc[1] += geom::dot(pj.d_b, g);
      acc[2] += geom::dot(pj.d_d, g);
    }
  }
  return total;
}

// Bounding spheres for polygon pruning in nearest-polygon scans.
struct PolyBounds {
  Vec3 center;
  double radius = 0.0;
};
std::vector<PolyBounds> polygon_bounds(const FitState& st) {
  std::vector<PolyBounds> out(st.rings.size());
  for (std::size_t p = 0; p < st.rings.size(); ++p) {
    const auto& ring = st.rings[p];
    if (ring.empty()) continue;
    Vec3 c{0, 0, 0};
    for (const Vec3& v : ring) c += v;
    c = c / static_cast<double>(ring.size());
    double r = 0.0;
    for (const Vec3& v : ring) r = std::max(r, geom::norm(v - c));
    out[p] = {c, r};
  }
  return out;
}

}  // namespace

double loss_prox(const FitState& state, std::span<const Vec3> skeleton_points, FitGradient* grad,
                 ExecMode mode) {
  if (state.set->polygons.empty() || skeleton_points.empty()) return 0.0;
  auto bounds = polygon_bounds(state);
  std::vector<Contribution> items(skeleton_points.size());

  indexed_for(mode, static_cast<std::int64_t>(skeleton_points.size()), [&](std::size_t i) {
    const Vec3& s = skeleton_points[i];
    double best = std::numeric_limits<double>::infinity();
    ClosestInfo best_info;
    std::size_t best_p = 0;
    for (std::size_t p = 0; p < state.rings.size(); ++p) {
      if (state.rings[p].size() < 3) continue;
      if (geom::norm(s - bounds[p].center) - bounds[p].radius > best) continue;
      ClosestInfo info = closest_feature(state, p, s);
      if (info.dist < best) {
        best = info.dist;
        best_info = info;
        best_p = p;
      }
    }
    if (!std::isfinite(best)) return;
    items[i].value = best;
    add_distance_entries(state, best_p, s, best_info, -1, items[i]);
  });
  return reduce_contributions(state, items, grad);
}

double loss_empty(const FitState& state, std::span<const io::ObservationSegment> segments,
                  double tau_inter, FitGradient* grad, ExecMode mode) {
  if (state.set->polygons.empty() || segments.empty()) return 0.0;
  std::vector<Contribution> items(segments.size());

  indexed_for(mode, static_cast<std::int64_t>(segments.size()), [&](std::size_t i) {
    const Vec3& o = segments[i].origin;
    const Vec3& e = segments[i].endpoint;
    Vec3 w = e - o;
    Contribution& c = items[i];
    for (std::size_t p = 0; p < state.rings.size(); ++p) {
      const auto& ring = state.rings[p];
      const auto& ring2 = state.rings2[p];
      if (ring.size() < 3) continue;
      const geom::Plane& pl = state.set->polygons[p].plane;
      double denom = geom::dot(pl.normal, w);
      if (std::abs(denom) <= 1e-12) continue;
      double s = (pl.offset - geom::dot(pl.normal, o)) / denom;
      if (!(s > 0.0 && s < 1.0)) continue;
      Vec3 hit = o + w * s;
      Vec2 hit2 = pl.to_plane(hit, state.bases[p]);
      if (!geom::point_in_ring(hit2, ring2, 0.0)) continue;

      // nearest polygon edge to the intersection point
      const std::size_t n = ring.size();
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_i = 0;
      double best_t = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Vec3& a = ring[k];
        const Vec3& b2 = ring[(k + 1) % n];
        Vec3 ab = b2 - a;
        double len2 = geom::norm2(ab);
        if (len2 < 1e-24) continue;
        double t = std::clamp(geom::dot(hit - a, ab) / len2, 0.0, 1.0);
        double d = geom::norm(hit - (a + ab * t));
        if (d < best) { best = d; best_i = k; best_t = t; }
      }
      if (!(best <= tau_inter) || !std::isfinite(best)) continue;
      c.value += best;
      if (best < kGradTiny) continue;

      const Vec3& a = ring[best_i];
      const Vec3& b2 = ring[(best_i + 1) % n];
      Vec3 foot = a + (b2 - a) * best_t;
      Vec3 u = (hit - foot) / best;
      int ia = static_cast<int>(state.set->polygons[p].ring[best_i]);
      int ib = static_cast<int>(state.set->polygons[p].ring[(best_i + 1) % n]);
      c.add(0, ia, u * -(1.0 - best_t));
      c.add(0, ib, u * -best_t);
      // plane motion moves the intersection point along the segment
      const auto& basis = state.bases[p];
      double uw = geom::dot(u, w);
      double ds_da = (-geom::dot(basis[0], o) - s * geom::dot(basis[0], w)) / denom;
      double ds_db = (-geom::dot(basis[1], o) - s * geom::dot(basis[1], w)) / denom;
      double ds_dd = 1.0 / denom;
      c.add(1, static_cast<int>(p), Vec3{uw * ds_da, uw * ds_db, uw * ds_dd});
    }
  });
  return reduce_contributions(state, items, grad);
}

double loss_connect(const FitState& state, double tau_connect, FitGradient* grad, ExecMode mode) {
  const auto& polys = state.set->polygons;
  if (polys.size() < 2) return 0.0;
  auto bounds = polygon_bounds(state);

  // One item per (polygon, ring position).
  std::vector<std::pair<int, int>> slots;
  for (std::size_t p = 0; p < polys.size(); ++p)
    for (std::size_t j = 0; j < polys[p].ring.size(); ++j)
      slots.emplace_back(static_cast<int>(p), static_cast<int>(j));
  std::vector<Contribution> items(slots.size());

  indexed_for(mode, static_cast<std::int64_t>(slots.size()), [&](std::size_t si) {
    auto [p, j] = slots[si];
    std::uint32_t vid = polys[p].ring[j];
    // Shared vertices sit on the other polygon's surface: zero term.
    if (state.owners[vid].size() >= 2) return;
    const Vec3& q = state.positions[vid];
    double best = std::numeric_limits<double>::infinity();
    ClosestInfo best_info;
    std::size_t best_p = 0;
    for (std::size_t p2 = 0; p2 < polys.size(); ++p2) {
      if (p2 == static_cast<std::size_t>(p) || state.rings[p2].size() < 3) continue;
      if (geom::norm(q - bounds[p2].center) - bounds[p2].radius > best) continue;
      ClosestInfo info = closest_feature(state, p2, q);
      if (info.dist < best) {
        best = info.dist;
        best_info = info;
        best_p = p2;
      }
    }
    if (!std::isfinite(best) || best > tau_connect) return;
    items[si].value = best;
    add_distance_entries(state, best_p, q, best_info, static_cast<int>(vid), items[si]);
  });
  return reduce_contributions(state, items, grad);
}

std::vector<std::vector<char>> shared_edge_flags(const PrototypeSet& set) {
  std::unordered_map<std::uint64_t, int> edge_count;
  auto key = [](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  for (const geom::Polygon3& poly : set.polygons) {
    const std::size_t n = poly.ring.size();
    for (std::size_t j = 0; j < n; ++j) edge_count[key(poly.ring[j], poly.ring[(j + 1) % n])]++;
  }
  std::vector<std::vector<char>> flags(set.polygons.size());
  for (std::size_t p = 0; p < set.polygons.size(); ++p) {
    const auto& ring = set.polygons[p].ring;
    flags[p].assign(ring.size(), 0);
    for (std::size_t j = 0; j < ring.size(); ++j)
      flags[p][j] = edge_count[key(ring[j], ring[(j + 1) % ring.size()])] >= 2 ? 1 : 0;
  }
  return flags;
}

double loss_simple(const FitState& state, FitGradient* grad, ExecMode mode) {
  const auto& polys = state.set->polygons;
  if (polys.empty()) return 0.0;
  auto shared = shared_edge_flags(*state.set);

  std::vector<std::pair<int, int>> slots;
  for (std::size_t p = 0; p < polys.size(); ++p)
    for (std::size_t j = 0; j < polys[p].ring.size(); ++j)
      if (!shared[p][j]) slots.emplace_back(static_cast<int>(p), static_cast<int>(j));
  std::vector<Contribution> items(slots.size());

  indexed_for(mode, static_cast<std::int64_t>(slots.size()), [&](std::size_t si) {
    auto [p, j] = slots[si];
    const auto& ring = polys[p].ring;
    std::uint32_t ia = ring[j];
    std::uint32_t ib = ring[(j + 1) % ring.size()];
    Vec3 d = state.positions[ia] - state.positions[ib];
    double len = geom::norm(d);
    if (len < kGradTiny) return;
    items[si].value = len;
    Vec3 u = d / len;
    items[si].add(0, static_cast<int>(ia), u);
    items[si].add(0, static_cast<int>(ib), -u);
  });
  return reduce_contributions(state, items, grad);
}

LossBreakdown total_loss(const FitState& state, std::span<const Vec3> skeleton_points,
                         std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                         FitGradient* grad, ExecMode mode) {
  LossBreakdown out;
  FitGradient scratch;
  if (grad) {
    // Accumulate each loss into a scratch gradient, then scale into grad so
    // per-loss weights apply cleanly.
    auto run = [&](double w, auto&& fn) {
      if (w == 0.0) return 0.0;
      scratch.resize(*state.set);
      double v = fn(&scratch);
      for (std::size_t i = 0; i < grad->d_vertex.size(); ++i)
        grad->d_vertex[i] += scratch.d_vertex[i] * w;
      for (std::size_t i = 0; i < grad->d_plane.size(); ++i)
        for (int k = 0; k < 3; ++k) grad->d_plane[i][k] += scratch.d_plane[i][k] * w;
      return v;
    };
    out.prox = run(cfg.w_prox, [&](FitGradient* g) { return loss_prox(state, skeleton_points, g, mode); });
    out.empty = run(cfg.w_empty, [&](FitGradient* g) { return loss_empty(state, segments, cfg.tau_inter, g, mode); });
    out.connect = run(cfg.w_connect, [&](FitGradient* g) { return loss_connect(state, cfg.tau_connect, g, mode); });
    out.simple = run(cfg.w_simple, [&](FitGradient* g) { return loss_simple(state, g, mode); });
  } else {
    out.prox = loss_prox(state, skeleton_points, nullptr, mode);
    out.empty = loss_empty(state, segments, cfg.tau_inter, nullptr, mode);
    out.connect = loss_connect(state, cfg.tau_connect, nullptr, mode);
    out.simple = loss_simple(state, nullptr, mode);
  }
  return out;
}

}  // namespace layoutkit::fit
