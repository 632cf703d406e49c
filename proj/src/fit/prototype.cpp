#include "layoutkit/fit/prototype.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "layoutkit/log.hpp"

namespace layoutkit::fit {

using geom::Plane;
using geom::Vec2;
using geom::Vec3;

void FitConfig::validate() const {
  if (!(tau_inter > 0 && tau_merge > 0 && tau_extend > 0 && tau_connect > 0 && step_size > 0))
    throw InputError("FitConfig thresholds must be positive");
  if (n_iters < 0 || merge_period <= 0) throw InputError("FitConfig iteration counts invalid");
}

std::vector<std::vector<int>> vertex_owners(const PrototypeSet& set) {
  std::vector<std::vector<int>> owners(set.vertices.size());
  for (std::size_t p = 0; p < set.polygons.size(); ++p) {
    for (std::uint32_t v : set.polygons[p].ring) {
      auto& list = owners[v];
      if (list.empty() || list.back() != static_cast<int>(p)) list.push_back(static_cast<int>(p));
    }
  }
  return owners;
}

namespace {

constexpr double kParallelDot = 0.99985;  // ~1 degree

// Owner planes deduplicated by normal direction; index order is kept so the
// selection is deterministic.
std::vector<int> effective_owners(const std::vector<int>& owner_polys, const PrototypeSet& set) {
  std::vector<int> eff;
  for (int p : owner_polys) {
    const Vec3& n = set.polygons[p].plane.normal;
    bool dup = false;
    for (int q : eff) {
      if (std::abs(geom::dot(n, set.polygons[q].plane.normal)) > kParallelDot) { dup = true; break; }
    }
    if (!dup) eff.push_back(p);
  }
  return eff;
}

std::array<Vec3, 3> identity_rows() {
  return {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
}

}  // namespace

VertexProjection project_vertex(const Vec3& x, const std::vector<int>& owner_polys,
                                const PrototypeSet& set, bool with_jacobians) {
  VertexProjection out;
  out.position = x;
  out.jac_rows = identity_rows();

  std::vector<int> eff = effective_owners(owner_polys, set);
  if (eff.empty()) return out;

  if (eff.size() == 1) {
    const Plane& pl = set.polygons[eff[0]].plane;
    const Vec3& n = pl.normal;
    double sd = pl.signed_distance(x);
    out.position = x - n * sd;
    if (with_jacobians) {
      // J = I - n n^T
      for (int r = 0; r < 3; ++r) {
        Vec3 row{r == 0 ? 1.0 : 0.0, r == 1 ? 1.0 : 0.0, r == 2 ? 1.0 : 0.0};
        out.jac_rows[r] = row - n * n[r];
      }
      auto basis = pl.basis();
      PlaneParamJac pj;
      pj.poly = eff[0];
      pj.d_d = n;
      pj.d_a = -(geom::dot(basis[0], x)) * n - sd * basis[0];
      pj.d_b = -(geom::dot(basis[1], x)) * n - sd * basis[1];
      out.planes.push_back(pj);
    }
    return out;
  }

  if (eff.size() == 2) {
    const Plane& p1 = set.polygons[eff[0]].plane;
    const Plane& p2 = set.polygons[eff[1]].plane;
    const Vec3 &n1 = p1.normal, &n2 = p2.normal;
    double c = geom::dot(n1, n2);
    double det = 1.0 - c * c;
    if (det < 1e-10) {
      // effectively parallel: project onto the first plane only
      return project_vertex(x, {eff[0]}, set, with_jacobians);
    }
    double r1 = p1.offset - geom::dot(n1, x);
    double r2 = p2.offset - geom::dot(n2, x);
    // M^-1 = 1/det [[1,-c],[-c,1]]
    auto msolve = [&](double a, double b) {
      return std::array<double, 2>{(a - c * b) / det, (b - c * a) / det};
    };
    auto y = msolve(r1, r2);
    out.position = x + n1 * y[0] + n2 * y[1];

    if (with_jacobians) {
      for (int r = 0; r < 3; ++r) {
        Vec3 e{r == 0 ? 1.0 : 0.0, r == 1 ? 1.0 : 0.0, r == 2 ? 1.0 : 0.0};
        auto dy = msolve(-n1[r], -n2[r]);
        Vec3 col = e + n1 * dy[0] + n2 * dy[1];
        out.jac_rows[r] = col;  // symmetric projector, rows == columns
      }
      auto jac_for = [&](int which) {
        const Plane& self = which == 0 ? p1 : p2;
        const Vec3& n_other = which == 0 ? n2 : n1;
        auto basis = self.basis();
        PlaneParamJac pj;
        pj.poly = eff[which];
        {
          auto dd = which == 0 ? msolve(1.0, 0.0) : msolve(0.0, 1.0);
          pj.d_d = n1 * dd[0] + n2 * dd[1];
        }
        for (int tb = 0; tb < 2; ++tb) {
          const Vec3& t = basis[tb];
          double dc = geom::dot(t, n_other);
          // delta(M) = [[0, dc],[dc, 0]]; delta(r_self) = -t.x
          double dr1 = which == 0 ? -geom::dot(t, x) : 0.0;
          double dr2 = which == 1 ? -geom::dot(t, x) : 0.0;
          // dy = M^-1 (dr - dM y)
          double dm1 = dc * y[1];
          double dm2 = dc * y[0];
          auto dy = msolve(dr1 - dm1, dr2 - dm2);
          Vec3 dq = n1 * dy[0] + n2 * dy[1] + t * y[which];
          if (tb == 0) pj.d_a = dq; else pj.d_b = dq;
        }
        return pj;
      };
      out.planes.push_back(jac_for(0));
      out.planes.push_back(jac_for(1));
    }
    return out;
  }

  // Three or more planes: least-squares point, rank-aware. Null directions
  // keep the current position's component (minimal move).
  double s00 = 0, s01 = 0, s02 = 0, s11 = 0, s12 = 0, s22 = 0;
  Vec3 b{0, 0, 0};
  for (int p : eff) {
    const Plane& pl = set.polygons[p].plane;
    const Vec3& n = pl.normal;
    s00 += n.x * n.x; s01 += n.x * n.y; s02 += n.x * n.z;
    s11 += n.y * n.y; s12 += n.y * n.z; s22 += n.z * n.z;
    b += n * pl.offset;
  }
  auto eig = geom::sym_eigen3(s00, s01, s02, s11, s12, s22);
  double lam_max = std::max(eig.values[2], 1e-300);
  Vec3 sx{s00 * x.x + s01 * x.y + s02 * x.z, s01 * x.x + s11 * x.y + s12 * x.z,
          s02 * x.x + s12 * x.y + s22 * x.z};
  Vec3 resid = b - sx;
  Vec3 q = x;
  for (int k = 0; k < 3; ++k) {
    if (eig.values[k] > 1e-8 * lam_max)
      q += eig.vectors[k] * (geom::dot(eig.vectors[k], resid) / eig.values[k]);
  }
  out.position = q;

  if (with_jacobians) {
    // Regularized inverse applied to a vector.
    auto sinv = [&](const Vec3& v) {
      Vec3 r{0, 0, 0};
      for (int k = 0; k < 3; ++k) {
        double lam = std::max(eig.values[k], 1e-8 * lam_max);
        r += eig.vectors[k] * (geom::dot(eig.vectors[k], v) / lam);
      }
      return r;
    };
    // dq/dx = projector onto the null space (zero when full rank).
    for (int r = 0; r < 3; ++r) out.jac_rows[r] = Vec3{0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      if (eig.values[k] <= 1e-8 * lam_max) {
        const Vec3& v = eig.vectors[k];
        for (int r = 0; r < 3; ++r) out.jac_rows[r] += v * v[r];
      }
    }
    for (int p : eff) {
      const Plane& pl = set.polygons[p].plane;
      const Vec3& n = pl.normal;
      auto basis = pl.basis();
      PlaneParamJac pj;
      pj.poly = p;
      pj.d_d = sinv(n);
      for (int tb = 0; tb < 2; ++tb) {
        const Vec3& t = basis[tb];
        // dS = t n^T + n t^T; db = d * t; dq = S^-1 (db - dS q)
        Vec3 ds_q = t * geom::dot(n, q) + n * geom::dot(t, q);
        Vec3 dq = sinv(t * pl.offset - ds_q);
        if (tb == 0) pj.d_a = dq; else pj.d_b = dq;
      }
      out.planes.push_back(pj);
    }
  }
  return out;
}

void project_all_vertices(PrototypeSet& set) {
  auto owners = vertex_owners(set);
  for (std::size_t v = 0; v < set.vertices.size(); ++v) {
    if (owners[v].empty()) continue;
    set.vertices[v] = project_vertex(set.vertices[v], owners[v], set, false).position;
  }
}

double max_plane_residual(const PrototypeSet& set) {
  double worst = 0.0;
  for (const geom::Polygon3& poly : set.polygons) {
    for (std::uint32_t v : poly.ring)
      worst = std::max(worst, std::abs(poly.plane.signed_distance(set.vertices[v])));
  }
  return worst;
}

void compact(PrototypeSet& set) {
  std::vector<geom::Polygon3> polys;
  for (geom::Polygon3& poly : set.polygons) {
    std::vector<std::uint32_t> ring;
    for (std::uint32_t v : poly.ring) {
      if (ring.empty() || ring.back() != v) ring.push_back(v);
    }
    while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    std::vector<std::uint32_t> distinct = ring;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) continue;
    poly.ring = std::move(ring);
    polys.push_back(std::move(poly));
  }
  set.polygons = std::move(polys);

  std::vector<std::uint32_t> remap(set.vertices.size(), UINT32_MAX);
  std::vector<Vec3> verts;
  for (geom::Polygon3& poly : set.polygons) {
    for (std::uint32_t& v : poly.ring) {
      if (remap[v] == UINT32_MAX) {
        remap[v] = static_cast<std::uint32_t>(verts.size());
        verts.push_back(set.vertices[v]);
      }
      v = remap[v];
    }
  }
  set.vertices = std::move(verts);
}

bool all_rings_simple(const PrototypeSet& set) {
  for (const geom::Polygon3& poly : set.polygons) {
    auto basis = poly.plane.basis();
    geom::Ring2 ring(poly.ring.size());
    for (std::size_t i = 0; i < poly.ring.size(); ++i)
      ring[i] = poly.plane.to_plane(set.vertices[poly.ring[i]], basis);
    if (!geom::ring_is_simple(ring, 1e-12)) return false;
  }
  return true;
}

double polygon_area_3d(const PrototypeSet& set, std::size_t poly) {
  auto pts = geom::ring_points(set.polygons[poly], set.vertices);
  return geom::ring_area_3d(pts);
}

Vec3 polygon_centroid(const PrototypeSet& set, std::size_t poly) {
  Vec3 c{0, 0, 0};
  for (std::uint32_t v : set.polygons[poly].ring) c += set.vertices[v];
  return c / static_cast<double>(set.polygons[poly].ring.size());
}

void write_prototype(const PrototypeSet& set, const std::string& path) {
  nlohmann::ordered_json doc;
  auto& verts = doc["vertices"] = nlohmann::ordered_json::array();
  for (const Vec3& v : set.vertices) verts.push_back({v.x, v.y, v.z});
  auto& polys = doc["polygons"] = nlohmann::ordered_json::array();
  for (const geom::Polygon3& p : set.polygons) {
    nlohmann::ordered_json rec;
    rec["class"] = p.sem_class;
    rec["normal"] = {p.plane.normal.x, p.plane.normal.y, p.plane.normal.z};
    rec["offset"] = p.plane.offset;
    rec["ring"] = p.ring;
    polys.push_back(rec);
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write prototype: " + path);
  out << doc.dump(1) << "\n";
}

PrototypeSet load_prototype(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prototype: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw InputError(std::string("malformed prototype JSON: ") + e.what());
  }
  PrototypeSet set;
  for (const auto& v : doc.at("vertices"))
    set.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
  for (const auto& p : doc.at("polygons")) {
    geom::Polygon3 poly;
    poly.sem_class = p.at("class").get<int>();
    const auto& n = p.at("normal");
    poly.plane.normal = geom::normalized(
        Vec3{n[0].get<double>(), n[1].get<double>(), n[2].get<double>()});
    poly.plane.offset = p.at("offset").get<double>();
    for (const auto& v : p.at("ring")) {
      std::uint32_t id = v.get<std::uint32_t>();
      if (id >= set.vertices.size()) throw InputError("prototype ring index out of range");
      poly.ring.push_back(id);
    }
    set.polygons.push_back(std::move(poly));
  }
  return set;
}

}  // namespace layoutkit::fit
