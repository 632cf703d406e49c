#include <doctest.h>

#include <cmath>
#include <random>

#include "layoutkit/fit/losses.hpp"

using namespace layoutkit;
using namespace layoutkit::fit;
using geom::Vec3;

namespace {

struct LossConfig {
  PrototypeSet set;
  std::vector<Vec3> skel;
  std::vector<io::ObservationSegment> segs;
};

// Random planar polygons, no shared vertices.
LossConfig random_config(int seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  LossConfig c;
  int n_poly = 4 + seed % 3;
  for (int p = 0; p < n_poly; ++p) {
    Vec3 n = geom::normalized(Vec3{uni(rng), uni(rng), uni(rng) + 1.5});
    geom::Plane pl{n, uni(rng)};
    auto basis = pl.basis();
    geom::Polygon3 poly;
    poly.plane = pl;
    poly.sem_class = 1;
    Vec3 center = pl.origin() + basis[0] * (uni(rng) * 2.0) + basis[1] * (uni(rng) * 2.0);
    int nv = 4 + (seed + p) % 3;
    for (int k = 0; k < nv; ++k) {
      double ang = 2 * M_PI * k / nv + 0.3 * uni(rng);
      double rad = 0.8 + 0.3 * uni(rng);
      Vec3 v = center + basis[0] * (rad * std::cos(ang)) + basis[1] * (rad * std::sin(ang));
      poly.ring.push_back(static_cast<std::uint32_t>(c.set.vertices.size()));
      c.set.vertices.push_back(v);
    }
    c.set.polygons.push_back(poly);
  }
  project_all_vertices(c.set);
  for (int i = 0; i < 30; ++i)
    c.skel.push_back(Vec3{2.5 * uni(rng), 2.5 * uni(rng), 2.5 * uni(rng)});
  for (int i = 0; i < 25; ++i)
    c.segs.push_back({Vec3{3 * uni(rng), 3 * uni(rng), 3 * uni(rng)},
                      Vec3{3 * uni(rng), 3 * uni(rng), 3 * uni(rng)}});
  return c;
}

// Floor plus two walls meeting at shared edges and a triple corner, jittered:
// exercises the 2-owner and 3-owner projections.
LossConfig corner_config(int seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-0.15, 0.15);
  LossConfig c;
  auto& V = c.set.vertices;
  auto addv = [&](double x, double y, double z) {
    V.push_back(Vec3{x + uni(rng) * 0.1, y + uni(rng) * 0.1, z + uni(rng) * 0.1});
    return static_cast<std::uint32_t>(V.size() - 1);
  };
  std::uint32_t corner = addv(0, 0, 0);
  std::uint32_t fx = addv(1.5, 0, 0), fy = addv(0, 1.5, 0), fxy = addv(1.5, 1.5, 0);
  std::uint32_t az = addv(0, 0, 1.2), ayz = addv(0, 1.5, 1.2);
  std::uint32_t bx2 = addv(1.5, 0, 1.2);
  auto mkpoly = [&](std::vector<std::uint32_t> ring, Vec3 n, double d) {
    geom::Polygon3 p;
    p.ring = std::move(ring);
    p.plane = {geom::normalized(n + Vec3{uni(rng) * 0.05, uni(rng) * 0.05, uni(rng) * 0.05}),
               d + uni(rng) * 0.05};
    p.sem_class = 1;
    c.set.polygons.push_back(p);
  };
  mkpoly({corner, fx, fxy, fy}, {0, 0, 1}, 0);
  mkpoly({corner, fy, ayz, az}, {1, 0, 0}, 0);
  mkpoly({corner, az, bx2}, {0, 1, 0}, 0);
  project_all_vertices(c.set);
  for (int i = 0; i < 25; ++i)
    c.skel.push_back(Vec3{uni(rng) * 8 + 0.6, uni(rng) * 8 + 0.6, uni(rng) * 8 + 0.5});
  for (int i = 0; i < 20; ++i)
    c.segs.push_back({Vec3{uni(rng) * 10 + 1, uni(rng) * 10 + 1, uni(rng) * 10 + 1},
                      Vec3{uni(rng) * 10 - 1, uni(rng) * 10 - 1, uni(rng) * 10 - 0.5}});
  return c;
}

double eval_loss(const LossConfig& c, int which, const FitConfig& cfg) {
  PrototypeSet s = c.set;
  project_all_vertices(s);
  FitState st = FitState::build(s, false);
  switch (which) {
    case 0: return loss_prox(st, c.skel, nullptr, ExecMode::Serial);
    case 1: return loss_empty(st, c.segs, cfg.tau_inter, nullptr, ExecMode::Serial);
    case 2: return loss_connect(st, cfg.tau_connect, nullptr, ExecMode::Serial);
    default: return loss_simple(st, nullptr, ExecMode::Serial);
  }
}

// Worst relative mismatch between analytic and central-difference gradients
// over all free variables (vertices and plane parameters).
double fd_relative_error(const LossConfig& c, int which, const FitConfig& cfg) {
  const double h = 1e-6;
  FitState st = FitState::build(c.set, true);
  FitGradient grad;
  grad.resize(c.set);
  switch (which) {
    case 0: loss_prox(st, c.skel, &grad, ExecMode::Serial); break;
    case 1: loss_empty(st, c.segs, cfg.tau_inter, &grad, ExecMode::Serial); break;
    case 2: loss_connect(st, cfg.tau_connect, &grad, ExecMode::Serial); break;
    default: loss_simple(st, &grad, ExecMode::Serial); break;
  }
  double norm_fd = 0.0, diff = 0.0;
  for (std::size_t v = 0; v < c.set.vertices.size(); ++v) {
    for (int k = 0; k < 3; ++k) {
      LossConfig cp = c, cm = c;
      cp.set.vertices[v][k] += h;
      cm.set.vertices[v][k] -= h;
      double fd = (eval_loss(cp, which, cfg) - eval_loss(cm, which, cfg)) / (2 * h);
      norm_fd = std::max(norm_fd, std::abs(fd));
      diff = std::max(diff, std::abs(fd - grad.d_vertex[v][k]));
    }
  }
  for (std::size_t p = 0; p < c.set.polygons.size(); ++p) {
    auto basis = c.set.polygons[p].plane.basis();
    for (int k = 0; k < 3; ++k) {
      LossConfig cp = c, cm = c;
      auto perturb = [&](LossConfig& cc, double delta) {
        geom::Plane& pl = cc.set.polygons[p].plane;
        if (k == 0) pl.normal = geom::normalized(pl.normal + basis[0] * delta);
        else if (k == 1) pl.normal = geom::normalized(pl.normal + basis[1] * delta);
        else pl.offset += delta;
      };
      perturb(cp, h);
      perturb(cm, -h);
      double fd = (eval_loss(cp, which, cfg) - eval_loss(cm, which, cfg)) / (2 * h);
      norm_fd = std::max(norm_fd, std::abs(fd));
      diff = std::max(diff, std::abs(fd - grad.d_plane[p][k]));
    }
  }
  return diff / std::max(norm_fd, 1e-8);
}

PrototypeSet square_at(double z, double size = 1.0, int cls = 2) {
  PrototypeSet set;
  geom::Polygon3 poly;
  poly.plane = {{0, 0, 1}, z};
  poly.sem_class = cls;
  for (auto [x, y] : {std::pair{0.0, 0.0}, {size, 0.0}, {size, size}, {0.0, size}}) {
    poly.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
    set.vertices.push_back({x, y, z});
  }
  set.polygons.push_back(poly);
  return set;
}

}  // namespace

TEST_CASE("loss_prox values") {
  PrototypeSet set = square_at(0.0);
  FitState st = FitState::build(set, false);

  std::vector<Vec3> on_surface{{0.5, 0.5, 0}, {0.1, 0.9, 0}};
  CHECK(loss_prox(st, on_surface, nullptr) == doctest::Approx(0.0));

  std::vector<Vec3> above{{0.5, 0.5, 0.7}};
  FitState stj = FitState::build(set, true);
  FitGradient grad;
  grad.resize(set);
  CHECK(loss_prox(stj, above, &grad) == doctest::Approx(0.7));
  // face term: whole gradient sits on the plane parameters, magnitude 1 in d
  CHECK(std::abs(grad.d_plane[0][2]) == doctest::Approx(1.0));
}

TEST_CASE("loss_empty values and threshold gate") {
  PrototypeSet set = square_at(0.0, 2.0);
  FitState st = FitState::build(set, false);

  std::vector<io::ObservationSegment> none{{{5, 5, -1}, {5, 5, 1}}};
  CHECK(loss_empty(st, none, 0.5, nullptr) == doctest::Approx(0.0));

  // pierce at the center of the 2x2 square: nearest edge 1.0 > tau 0.5
  std::vector<io::ObservationSegment> center{{{1, 1, -1}, {1, 1, 1}}};
  CHECK(loss_empty(st, center, 0.5, nullptr) == doctest::Approx(0.0));

  // pierce 0.2 from an edge
  std::vector<io::ObservationSegment> near_edge{{{0.2, 1, -1}, {0.2, 1, 1}}};
  CHECK(loss_empty(st, near_edge, 0.5, nullptr) == doctest::Approx(0.2));
}

TEST_CASE("loss_connect values") {
  // two unit squares sharing an edge via shared pool vertices
  PrototypeSet set;
  auto add = [&](double x, double y) {
    set.vertices.push_back({x, y, 0});
    return static_cast<std::uint32_t>(set.vertices.size() - 1);
  };
  auto a0 = add(0, 0), a1 = add(1, 0), a2 = add(1, 1), a3 = add(0, 1);
  auto b1 = add(2, 0), b2 = add(2, 1);
  geom::Polygon3 p1, p2;
  p1.plane = p2.plane = {{0, 0, 1}, 0};
  p1.sem_class = p2.sem_class = 2;
  p1.ring = {a0, a1, a2, a3};
  p2.ring = {a1, b1, b2, a2};
  set.polygons = {p1, p2};
  FitState st = FitState::build(set, false);
  // shared vertices contribute 0; the far vertices are farther than tau
  CHECK(loss_connect(st, 0.3, nullptr) == doctest::Approx(0.0));

  // a wall vertex 0.05 above the floor
  PrototypeSet two = square_at(0.0, 2.0);
  geom::Polygon3 wall;
  wall.plane = {{1, 0, 0}, 1.0};
  wall.sem_class = 1;
  for (auto [y, z] : {std::pair{0.2, 0.05}, {0.8, 0.05}, {0.8, 0.9}, {0.2, 0.9}}) {
    wall.ring.push_back(static_cast<std::uint32_t>(two.vertices.size()));
    two.vertices.push_back({1.0, y, z});
  }
  two.polygons.push_back(wall);
  FitState st2 = FitState::build(two, false);
  // the two bottom wall vertices are each 0.05 above the floor surface;
  // floor vertices find the wall within reach as well
  double val = loss_connect(st2, 0.3, nullptr);
  CHECK(val >= 0.1 - 1e-9);
}

TEST_CASE("loss_simple counts unshared edge length") {
  PrototypeSet one = square_at(0.0);
  FitState st1 = FitState::build(one, false);
  CHECK(loss_simple(st1, nullptr) == doctest::Approx(4.0));

  // two unit squares sharing one full edge -> 6 unshared unit edges
  PrototypeSet set;
  auto add = [&](double x, double y) {
    set.vertices.push_back({x, y, 0});
    return static_cast<std::uint32_t>(set.vertices.size() - 1);
  };
  auto a0 = add(0, 0), a1 = add(1, 0), a2 = add(1, 1), a3 = add(0, 1);
  auto b1 = add(2, 0), b2 = add(2, 1);
  geom::Polygon3 p1, p2;
  p1.plane = p2.plane = {{0, 0, 1}, 0};
  p1.sem_class = p2.sem_class = 2;
  p1.ring = {a0, a1, a2, a3};
  p2.ring = {a1, b1, b2, a2};
  set.polygons = {p1, p2};
  FitState st = FitState::build(set, false);
  CHECK(loss_simple(st, nullptr) == doctest::Approx(6.0));
}

TEST_CASE("analytic gradients match central differences") {
  FitConfig cfg;
  for (int which = 0; which < 4; ++which) {
    CAPTURE(which);
    for (int trial = 0; trial < 20; ++trial) {
      CAPTURE(trial);
      LossConfig c = random_config(trial * 17 + 3);
      CHECK(fd_relative_error(c, which, cfg) <= 1e-4);
    }
  }
}

TEST_CASE("gradients match finite differences with shared vertices") {
  FitConfig cfg;
  for (int which = 0; which < 4; ++which) {
    CAPTURE(which);
    for (int trial = 0; trial < 10; ++trial) {
      CAPTURE(trial);
      LossConfig c = corner_config(trial * 13 + 1);
      CHECK(fd_relative_error(c, which, cfg) <= 1e-4);
    }
  }
}
