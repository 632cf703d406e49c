#include <doctest.h>

#include <cmath>
#include <random>

#include "layoutkit/graph/assemble.hpp"
#include "layoutkit/graph/features.hpp"
#include "layoutkit/graph/rooms.hpp"
#include "layoutkit/io/semantic.hpp"
#include "layoutkit/log.hpp"
#include "synthetic.hpp"

using namespace layoutkit;
using namespace layoutkit::graph;
using geom::Polygon2;
using geom::Vec2;
using geom::Vec3;

namespace {

fit::PrototypeSet floors_at(const std::vector<std::pair<double, double>>& height_size) {
  fit::PrototypeSet set;
  for (auto [z, size] : height_size) {
    geom::Polygon3 f;
    f.plane = {{0, 0, 1}, z};
    f.sem_class = static_cast<int>(io::SemanticClass::Floor);
    for (auto [x, y] : {std::pair{0.0, 0.0}, {size, 0.0}, {size, size}, {0.0, size}}) {
      f.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
      set.vertices.push_back({x, y, z});
    }
    set.polygons.push_back(f);
  }
  return set;
}

void add_rect_poly(fit::PrototypeSet& set, io::SemanticClass cls, Vec3 o, Vec3 eu, Vec3 ev) {
  geom::Polygon3 p;
  Vec3 n = geom::normalized(geom::cross(eu, ev));
  p.plane = {n, geom::dot(n, o)};
  p.sem_class = static_cast<int>(cls);
  for (const Vec3& v : {o, o + eu, o + eu + ev, o + ev}) {
    p.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
    set.vertices.push_back(v);
  }
  set.polygons.push_back(p);
}

}  // namespace

TEST_CASE("detect_levels clusters floor heights") {
  GraphConfig cfg;
  SUBCASE("two well-separated floors") {
    auto set = floors_at({{0.0, 4.0}, {3.0, 4.0}});
    auto levels = detect_levels(set, cfg);
    REQUIRE(levels.size() == 2);
    CHECK(levels[0].height == doctest::Approx(0.0));
    CHECK(levels[1].height == doctest::Approx(3.0));
  }
  SUBCASE("close floors merge") {
    auto set = floors_at({{0.0, 4.0}, {0.2, 4.0}});
    CHECK(detect_levels(set, cfg).size() == 1);
  }
  SUBCASE("split level takes the area-weighted mean") {
    auto set = floors_at({{0.0, 4.0}, {0.2, 2.0}, {3.0, 4.0}});
    auto levels = detect_levels(set, cfg);
    REQUIRE(levels.size() == 2);
    double w_mean = (0.0 * 16.0 + 0.2 * 4.0) / 20.0;
    CHECK(levels[0].height == doctest::Approx(w_mean));
  }
  SUBCASE("no floors is an error") {
    fit::PrototypeSet empty;
    CHECK_THROWS_AS(detect_levels(empty, cfg), InputError);
  }
}

TEST_CASE("build_floorplan merges floors with ceilings") {
  GraphConfig cfg;
  SUBCASE("ceiling patches a missing floor corner") {
    fit::PrototypeSet set;
    // floor: 4x4 minus 1x1 corner (L shape)
    geom::Polygon3 floor;
    floor.plane = {{0, 0, 1}, 0};
    floor.sem_class = static_cast<int>(io::SemanticClass::Floor);
    for (auto [x, y] : {std::pair{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0}, {3.0, 3.0},
                        {3.0, 4.0}, {0.0, 4.0}}) {
      floor.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
      set.vertices.push_back({x, y, 0});
    }
    set.polygons.push_back(floor);
    add_rect_poly(set, io::SemanticClass::Ceiling, {0, 0, 2.5}, {4, 0, 0}, {0, 4, 0});

    auto levels = detect_levels(set, cfg);
    REQUIRE(levels.size() == 1);
    build_floorplan(levels[0], set, levels, cfg);
    double area = 0;
    for (const auto& p : levels[0].floorplan) area += geom::polygon_area(p);
    CHECK(area == doctest::Approx(16.0).epsilon(1e-6));
  }
  SUBCASE("no ceilings: floorplan equals floor footprint") {
    auto set = floors_at({{0.0, 4.0}});
    auto levels = detect_levels(set, cfg);
    build_floorplan(levels[0], set, levels, cfg);
    REQUIRE(levels[0].floorplan.size() == 1);
    CHECK(geom::polygon_area(levels[0].floorplan[0]) == doctest::Approx(16.0));
  }
  SUBCASE("disjoint floor patches joined by a ceiling strip") {
    fit::PrototypeSet set;
    add_rect_poly(set, io::SemanticClass::Floor, {0, 0, 0}, {2, 0, 0}, {0, 2, 0});
    add_rect_poly(set, io::SemanticClass::Floor, {3, 0, 0}, {2, 0, 0}, {0, 2, 0});
    add_rect_poly(set, io::SemanticClass::Ceiling, {1.5, 0.5, 2.5}, {2, 0, 0}, {0, 1, 0});
    auto levels = detect_levels(set, cfg);
    REQUIRE(levels.size() == 1);
    build_floorplan(levels[0], set, levels, cfg);
    CHECK(levels[0].floorplan.size() == 1);  // connected now
  }
}

TEST_CASE("segment_rooms splits two rooms through a gap") {
  GraphConfig cfg;
  fit::PrototypeSet set;
  // dividing wall faces with a 0.9 m gap centered in y
  double gap_lo = (3.0 - 0.9) / 2.0, gap_hi = gap_lo + 0.9;
  add_rect_poly(set, io::SemanticClass::Wall, {3.05, 0, 0}, {0, gap_lo, 0}, {0, 0, 2.5});
  add_rect_poly(set, io::SemanticClass::Wall, {3.05, gap_hi, 0}, {0, 3.0 - gap_hi, 0},
                {0, 0, 2.5});
  std::vector<std::size_t> wall_ids{0, 1};

  std::vector<Polygon2> floorplan{{{{0, 0}, {6.1, 0}, {6.1, 3}, {0, 3}}, {}}};
  auto seg = segment_rooms(floorplan, set, wall_ids, cfg);
  REQUIRE(seg.rooms.size() == 2);
  REQUIRE(seg.openings.size() == 1);
  CHECK(seg.openings[0].width == doctest::Approx(0.9).epsilon(0.12));

  // partition property: room areas sum to the floorplan area
  double sum = 0;
  for (const auto& r : seg.rooms) sum += geom::polygon_area(r);
  CHECK(sum == doctest::Approx(6.1 * 3.0).epsilon(0.02));
}

TEST_CASE("segment_rooms open studio stays one room") {
  GraphConfig cfg;
  fit::PrototypeSet set;
  std::vector<Polygon2> floorplan{{{{0, 0}, {5, 0}, {5, 4}, {0, 4}}, {}}};
  auto seg = segment_rooms(floorplan, set, {}, cfg);
  CHECK(seg.rooms.size() == 1);
  CHECK(seg.openings.empty());
  CHECK(geom::polygon_area(seg.rooms[0]) == doctest::Approx(20.0).epsilon(0.02));
}

TEST_CASE("extrude_room box with flat ceiling") {
  GraphConfig cfg;
  Polygon2 footprint{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}, {}};
  CeilingCandidate flat;
  flat.plane = {{0, 0, 1}, 2.5};
  flat.footprint = footprint;
  flat.area = 12.0;
  geom::Plane floor{{0, 0, 1}, 0};

  RoomShell shell = extrude_room(footprint, {flat}, floor, cfg);
  CHECK(!shell.used_default_ceiling);
  CHECK(shell_watertight(shell));
  CHECK(shell.wall_polys.size() == 4);
  CHECK(shell.ceiling_polys.size() == 1);
  CHECK(ceiling_hits(shell, {2.0, 1.5}) == 1);
}

TEST_CASE("extrude_room gabled roof has no seams along the ridge") {
  GraphConfig cfg;
  Polygon2 footprint{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}, {}};
  // two slopes meeting at x = 2: z = 2.5 + 0.3*(x-2) and z = 2.5 - 0.3*(x-2)
  CeilingCandidate left, right;
  left.plane = geom::Plane{geom::normalized(Vec3{-0.3, 0, 1}), 0};
  left.plane.offset = geom::dot(left.plane.normal, Vec3{2, 0, 2.5});
  left.footprint = Polygon2{{{-0.2, -0.2}, {2, -0.2}, {2, 3.2}, {-0.2, 3.2}}, {}};
  left.area = 6.0;
  right.plane = geom::Plane{geom::normalized(Vec3{0.3, 0, 1}), 0};
  right.plane.offset = geom::dot(right.plane.normal, Vec3{2, 0, 2.5});
  right.footprint = Polygon2{{{2, -0.2}, {4.2, -0.2}, {4.2, 3.2}, {2, 3.2}}, {}};
  right.area = 6.0;

  RoomShell shell = extrude_room(footprint, {left, right}, {{0, 0, 1}, 0}, cfg);
  CHECK(shell_watertight(shell));
  int seams = 0;
  for (const auto& f : shell.faces)
    if (f.kind == FaceKind::Seam) ++seams;
  CHECK(seams == 0);  // heights agree along the ridge
  CHECK(ceiling_hits(shell, {1.0, 1.5}) == 1);
  CHECK(ceiling_hits(shell, {3.0, 1.5}) == 1);
}

TEST_CASE("extrude_room two flat candidates make one seam band") {
  GraphConfig cfg;
  Polygon2 footprint{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}, {}};
  CeilingCandidate low, high;
  low.plane = {{0, 0, 1}, 2.4};
  low.footprint = Polygon2{{{0, 0}, {2, 0}, {2, 3}, {0, 3}}, {}};
  low.area = 6.0;
  high.plane = {{0, 0, 1}, 3.0};
  high.footprint = Polygon2{{{2, 0}, {4, 0}, {4, 3}, {2, 3}}, {}};
  high.area = 6.0;

  RoomShell shell = extrude_room(footprint, {low, high}, {{0, 0, 1}, 0}, cfg);
  CHECK(shell_watertight(shell));
  double seam_area = 0;
  for (const auto& f : shell.faces) {
    if (f.kind != FaceKind::Seam) continue;
    seam_area += geom::ring_area_3d(f.ring);
  }
  CHECK(seam_area == doctest::Approx(0.6 * 3.0).epsilon(1e-6));
}

TEST_CASE("extrude_room without candidates falls back to the default height") {
  GraphConfig cfg;
  Polygon2 footprint{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}, {}};
  RoomShell shell = extrude_room(footprint, {}, {{0, 0, 1}, 0}, cfg);
  CHECK(shell.used_default_ceiling);
  CHECK(shell_watertight(shell));
  double top = 0;
  for (const auto& f : shell.faces)
    if (f.kind == FaceKind::Ceiling)
      for (const auto& v : f.ring) top = std::max(top, v.z);
  CHECK(top == doctest::Approx(cfg.default_ceiling));
}

TEST_CASE("detect_stairs connects two levels") {
  GraphConfig cfg;
  using SC = io::SemanticClass;
  std::vector<testsupport::SurfaceQuad> steps;
  for (int s = 0; s < 10; ++s) {
    double x = 0.5 + s * 0.25, z = (s + 1) * 0.27;
    steps.push_back({{x, 0.5, z}, {0.25, 0, 0}, {0, 1.0, 0}, SC::Stairs});
    steps.push_back({{x, 0.5, z - 0.27}, {0, 0, 0.27}, {0, 1.0, 0}, SC::Stairs});
  }
  io::LabeledMesh stairs_mesh = testsupport::mesh_from_quads(steps, 0.08);

  std::vector<Level> levels(2);
  levels[0].id = 0;
  levels[0].height = 0.0;
  levels[1].id = 1;
  levels[1].height = 2.7;
  std::vector<PlacedRoom> rooms = {
      {0, Polygon2{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}, {}}},
      {1, Polygon2{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}, {}}},
  };

  auto edges = detect_stairs(stairs_mesh, rooms, levels, cfg);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].level_a == 0);
  CHECK(edges[0].level_b == 1);
  CHECK(edges[0].room_a == 0);
  CHECK(edges[0].room_b == 1);
  // ramp slope between 10 and 60 degrees
  double slope = std::acos(std::abs(edges[0].ramp_plane.normal.z)) * 180.0 / M_PI;
  CHECK(slope > 10.0);
  CHECK(slope < 60.0);

  SUBCASE("two separate staircases give two edges") {
    auto shifted = steps;
    for (auto& q : shifted) q.origin.y += 5.0;
    auto both = steps;
    both.insert(both.end(), shifted.begin(), shifted.end());
    io::LabeledMesh two = testsupport::mesh_from_quads(both, 0.08);
    std::vector<PlacedRoom> wide = {
        {0, Polygon2{{{0, 0}, {4, 0}, {4, 8}, {0, 8}}, {}}},
        {1, Polygon2{{{0, 0}, {4, 0}, {4, 8}, {0, 8}}, {}}},
    };
    CHECK(detect_stairs(two, wide, levels, cfg).size() == 2);
  }
  SUBCASE("small components are dropped") {
    std::vector<testsupport::SurfaceQuad> tiny = {
        {{1, 1, 1}, {0.1, 0, 0}, {0, 0.1, 0.05}, SC::Stairs}};
    io::LabeledMesh small = testsupport::mesh_from_quads(tiny, 0.05);
    CHECK(detect_stairs(small, rooms, levels, cfg).empty());
  }
}

TEST_CASE("detect_windows fits a rectangle from labeled pixels") {
  GraphConfig cfg;
  // a single room shell with one wall at y=0
  RoomShell shell;
  shell.wall_polys = {{{0, 0, 0}, {4, 0, 0}, {4, 0, 2.5}, {0, 0, 2.5}},
                      {{0, 3, 0}, {4, 3, 0}, {4, 3, 2.5}, {0, 3, 2.5}}};

  // camera inside looking at the wall; window region [1.4,2.6] x z[0.9,1.9]
  auto frames = testsupport::camera_ring({2.0, 1.5, 1.25}, 1, 200, 150, 120.0);
  auto& f = frames[0];
  // face the y=0 wall: forward = (0,-1,0), right=(?, 0, ?), down=(0,0,-1)
  f.world_from_camera.rotation_rows = {Vec3{-1, 0, 0}, Vec3{0, 0, -1}, Vec3{0, -1, 0}};
  f.world_from_camera.translation = {2.0, 1.5, 1.25};
  f.depth = io::DepthImage(f.width, f.height, 1000);
  io::LabelImage labels(f.width, f.height, static_cast<std::uint8_t>(io::SemanticClass::Wall));
  // mark pixels whose wall hit lands in the window rect
  int marked = 0;
  for (int v = 0; v < f.height; ++v) {
    for (int u = 0; u < f.width; ++u) {
      Vec3 dir_cam{(u - f.cx) / f.fx, (v - f.cy) / f.fy, 1.0};
      const auto& R = f.world_from_camera.rotation_rows;
      Vec3 dir{geom::dot(R[0], dir_cam), geom::dot(R[1], dir_cam), geom::dot(R[2], dir_cam)};
      if (std::abs(dir.y) < 1e-9) continue;
      double t = (0.0 - f.center().y) / dir.y;
      if (t <= 0) continue;
      Vec3 hit = f.center() + dir * t;
      if (hit.x >= 1.4 && hit.x <= 2.6 && hit.z >= 0.9 && hit.z <= 1.9) {
        labels.at(u, v) = static_cast<std::uint8_t>(io::SemanticClass::Window);
        ++marked;
      }
    }
  }
  REQUIRE(marked > 200);
  f.pixel_labels = std::move(labels);

  auto windows = detect_windows(frames, {shell}, cfg);
  REQUIRE(windows.size() == 1);
  double lo_x = 1e300, hi_x = -1e300, lo_z = 1e300, hi_z = -1e300;
  for (const auto& c : windows[0].corners) {
    lo_x = std::min(lo_x, c.x); hi_x = std::max(hi_x, c.x);
    lo_z = std::min(lo_z, c.z); hi_z = std::max(hi_z, c.z);
  }
  CHECK(std::abs(lo_x - 1.4) < 0.1);
  CHECK(std::abs(hi_x - 2.6) < 0.1);
  CHECK(std::abs(lo_z - 0.9) < 0.1);
  CHECK(std::abs(hi_z - 1.9) < 0.1);

  SUBCASE("clusters below 10 points are rejected") {
    // keep only 8 window pixels
    io::LabelImage sparse(f.width, f.height,
                          static_cast<std::uint8_t>(io::SemanticClass::Wall));
    int kept = 0;
    for (int v = 0; v < f.height && kept < 8; ++v)
      for (int u = 0; u < f.width && kept < 8; ++u)
        if (f.pixel_labels->at(u, v) == static_cast<int>(io::SemanticClass::Window)) {
          sparse.at(u, v) = static_cast<std::uint8_t>(io::SemanticClass::Window);
          ++kept;
        }
    auto f2 = f;
    f2.pixel_labels = sparse;
    CHECK(detect_windows({f2}, {shell}, cfg).empty());
  }
}

TEST_CASE("assemble_scene_graph") {
  GraphConfig cfg;
  std::vector<Level> levels(1);
  levels[0].id = 0;
  levels[0].height = 0.0;

  auto make_room = [&](double x0) {
    RoomRecord rec;
    rec.level_id = 0;
    rec.footprint = Polygon2{{{x0, 0}, {x0 + 3, 0}, {x0 + 3, 3}, {x0, 3}}, {}};
    CeilingCandidate flat;
    flat.plane = {{0, 0, 1}, 2.5};
    flat.footprint = rec.footprint;
    flat.area = 9.0;
    rec.shell = extrude_room(rec.footprint, {flat}, {{0, 0, 1}, 0}, cfg);
    return rec;
  };
  std::vector<RoomRecord> rooms{make_room(0.0), make_room(3.0)};

  PlacedOpening door;
  door.room_a = 0;
  door.room_b = 1;
  door.a = {3.0, 1.05};
  door.b = {3.0, 1.95};
  door.width = 0.9;
  door.floor_z = 0.0;

  auto graph = assemble_scene_graph(levels, rooms, {door}, {}, {}, cfg);
  CHECK(graph.rooms.size() == 2);
  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0].kind == io::EdgeKind::Door);
  CHECK(graph.edges[0].width_m == doctest::Approx(0.9));
  // door geometry rises to 2.1 (below the 2.5 ceiling)
  double top = 0;
  for (const auto& v : graph.edges[0].geometry) top = std::max(top, v.z);
  CHECK(top == doctest::Approx(2.1));
  // host wall split: the x=3 wall of room 0 became several pieces
  CHECK(graph.rooms[0].walls.size() > rooms[0].shell.wall_polys.size());

  SUBCASE("width 2.5 becomes an opening, 1.5 exactly too") {
    PlacedOpening wide = door;
    wide.width = 2.5;
    auto g2 = assemble_scene_graph(levels, rooms, {wide}, {}, {}, cfg);
    CHECK(g2.edges[0].kind == io::EdgeKind::Opening);

    PlacedOpening boundary = door;
    boundary.width = 1.5;
    auto g3 = assemble_scene_graph(levels, rooms, {boundary}, {}, {}, cfg);
    CHECK(g3.edges[0].kind == io::EdgeKind::Opening);  // strict inequality
  }
  SUBCASE("empty edge list is a valid graph") {
    auto g2 = assemble_scene_graph(levels, rooms, {}, {}, {}, cfg);
    CHECK(g2.edges.empty());
    g2.validate();
  }
}
