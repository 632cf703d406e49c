#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "layoutkit/io/camera.hpp"
#include "layoutkit/io/image.hpp"
#include "layoutkit/io/mesh.hpp"
#include "layoutkit/io/export.hpp"
#include "layoutkit/io/observation.hpp"
#include "layoutkit/io/scene_graph.hpp"
#include "layoutkit/log.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace layoutkit;
using geom::Vec3;

namespace {

std::string temp_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / ("lk_io_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("labeled mesh PLY round trip") {
  std::string dir = temp_dir();
  io::LabeledMesh cube;
  for (int z = 0; z <= 1; ++z)
    for (int y = 0; y <= 1; ++y)
      for (int x = 0; x <= 1; ++x) {
        cube.vertices.push_back({double(x), double(y), double(z)});
        cube.vertex_labels.push_back(io::SemanticClass::Wall);
      }
  // 12 triangles over the 6 faces
  const std::uint32_t f[6][4] = {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                                 {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}};
  for (const auto& face : f) {
    cube.triangles.push_back({face[0], face[1], face[2]});
    cube.triangles.push_back({face[0], face[2], face[3]});
  }
  std::string path = dir + "/cube.ply";
  io::write_labeled_mesh(cube, path);
  io::LabeledMesh loaded = io::load_labeled_mesh(path);
  CHECK(loaded.vertex_count() == 8);
  CHECK(loaded.triangle_count() == 12);
  CHECK(loaded.vertex_labels[0] == io::SemanticClass::Wall);
}

TEST_CASE("PLY without label property errors") {
  std::string dir = temp_dir();
  std::string path = dir + "/nolabel.ply";
  std::ofstream out(path, std::ios::binary);
  out << "ply\nformat binary_little_endian 1.0\n"
         "element vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
         "element face 0\nproperty list uchar int vertex_indices\nend_header\n";
  float xyz[3] = {0, 0, 0};
  out.write(reinterpret_cast<const char*>(xyz), 12);
  out.close();
  CHECK_THROWS_WITH_AS(io::load_labeled_mesh(path),
                       doctest::Contains("missing vertex property label"), InputError);
}

TEST_CASE("degenerate triangles are dropped on load") {
  std::string dir = temp_dir();
  io::LabeledMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}};
  mesh.vertex_labels.assign(4, io::SemanticClass::Floor);
  mesh.triangles = {{0, 1, 2}, {0, 1, 3}};  // second is collinear
  std::string path = dir + "/degen.ply";
  io::write_labeled_mesh(mesh, path);
  io::LabeledMesh loaded = io::load_labeled_mesh(path);
  CHECK(loaded.triangle_count() == 1);
}

TEST_CASE("PNG 16-bit and 8-bit round trips") {
  std::string dir = temp_dir();
  io::DepthImage depth(17, 9);
  std::mt19937 rng(2);
  for (auto& v : depth.data) v = static_cast<std::uint16_t>(rng() % 65536);
  io::write_png16(depth, dir + "/d.png");
  io::DepthImage loaded = io::read_png16(dir + "/d.png");
  REQUIRE(loaded.width == 17);
  REQUIRE(loaded.height == 9);
  CHECK(loaded.data == depth.data);

  io::LabelImage labels(5, 4);
  for (auto& v : labels.data) v = static_cast<std::uint8_t>(rng() % 10);
  io::write_png8(labels, dir + "/l.png");
  io::LabelImage lloaded = io::read_png8(dir + "/l.png");
  CHECK(lloaded.data == labels.data);
}

TEST_CASE("camera projection inverts unprojection") {
  auto frames = testsupport::camera_ring({1.0, 2.0, 1.4}, 6, 64, 48, 40.0);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> px(0, 63), py(0, 47);
  std::uniform_real_distribution<double> ud(0.5, 5.0);
  for (const auto& f : frames) {
    CHECK(f.world_from_camera.is_rigid());
    for (int k = 0; k < 50; ++k) {
      double u = px(rng), v = py(rng), d = ud(rng);
      Vec3 world = f.unproject(u, v, d);
      double u2, v2, d2;
      REQUIRE(f.project(world, u2, v2, d2));
      CHECK(std::abs(u2 - u) < 1e-6);
      CHECK(std::abs(v2 - v) < 1e-6);
      CHECK(std::abs(d2 - d) < 1e-6);
    }
  }
}

TEST_CASE("cameras.json round trip") {
  std::string dir = temp_dir();
  auto frames = testsupport::camera_ring({0.5, 0.5, 1.0}, 3, 32, 24, 20.0);
  io::write_cameras(frames, dir + "/cameras.json");
  auto loaded = io::load_cameras(dir + "/cameras.json");
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded[i].id == frames[i].id);
    CHECK(geom::norm(loaded[i].center() - frames[i].center()) < 1e-12);
  }
}

TEST_CASE("observation segments") {
  // identity pose, fx=fy=1, cx=cy=0: pixel (0,0) at depth 2 -> (0,0,2)
  io::CameraFrame f;
  f.id = 0;
  f.width = 4;
  f.height = 4;
  f.fx = f.fy = 1;
  f.cx = f.cy = 0;
  f.depth = io::DepthImage(4, 4, 0);
  f.depth.at(0, 0) = 2000;
  auto segs = io::build_observation_segments({f}, 1);
  REQUIRE(segs.size() == 1);
  CHECK(geom::norm(segs[0].origin - Vec3{0, 0, 0}) < 1e-12);
  CHECK(geom::norm(segs[0].endpoint - Vec3{0, 0, 2}) < 1e-9);

  SUBCASE("all-invalid depth yields no segments") {
    io::CameraFrame empty = f;
    empty.depth = io::DepthImage(4, 4, 0);
    CHECK(io::build_observation_segments({empty}, 1).empty());
  }
  SUBCASE("stride bounds the count") {
    io::CameraFrame full = f;
    full.width = 640;
    full.height = 480;
    full.depth = io::DepthImage(640, 480, 1000);
    auto s = io::build_observation_segments({full}, 8);
    CHECK(s.size() <= 80u * 60u);
  }
  SUBCASE("endpoints reproject with the stored depth") {
    auto scene = testsupport::box_room_scene();
    auto segs2 = io::build_observation_segments(scene.frames, 16);
    REQUIRE(!segs2.empty());
    for (std::size_t i = 0; i < segs2.size(); i += 7) {
      bool found = false;
      for (const auto& fr : scene.frames) {
        if (geom::norm(fr.center() - segs2[i].origin) > 1e-12) continue;
        double u, v, d;
        if (!fr.project(segs2[i].endpoint, u, v, d)) continue;
        int ui = static_cast<int>(std::lround(u)), vi = static_cast<int>(std::lround(v));
        if (!fr.depth.in_bounds(ui, vi)) continue;
        if (std::abs(fr.depth_at(ui, vi) - d) < 1e-3) found = true;  // mm quantization
      }
      CHECK(found);
    }
  }
}

TEST_CASE("backproject_labeled_pixels") {
  auto scene = testsupport::box_room_scene();
  const auto& f = scene.frames[0];

  auto pts = io::backproject_labeled_pixels(f, 5000, 7);
  CHECK(pts.size() == 5000);

  auto again = io::backproject_labeled_pixels(f, 5000, 7);
  REQUIRE(again.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); i += 101) {
    CHECK(geom::norm(again[i].position - pts[i].position) == 0.0);
    CHECK(again[i].label == pts[i].label);
  }

  SUBCASE("capped at valid pixel count") {
    io::CameraFrame tiny;
    tiny.width = 8;
    tiny.height = 8;
    tiny.fx = tiny.fy = 4;
    tiny.cx = tiny.cy = 4;
    tiny.depth = io::DepthImage(8, 8, 0);
    tiny.pixel_labels = io::LabelImage(8, 8, 1);
    for (int i = 0; i < 10; ++i) tiny.depth.at(i % 8, i / 8) = 1000;
    CHECK(io::backproject_labeled_pixels(tiny, 5000, 1).size() == 10);
  }
  SUBCASE("missing labels error") {
    io::CameraFrame nolabel = f;
    nolabel.pixel_labels.reset();
    CHECK_THROWS_AS(io::backproject_labeled_pixels(nolabel, 10, 1), InputError);
  }
}

TEST_CASE("label vocabulary mapping applies at ingestion") {
  std::string dir = temp_dir();
  fs::create_directories(dir + "/labels");
  fs::create_directories(dir + "/depth");
  auto frames = testsupport::camera_ring({0, 0, 1}, 1, 8, 6, 4.0);
  io::write_cameras(frames, dir + "/cameras.json");
  io::LabelImage raw(8, 6, 200);  // external vocabulary id
  io::write_png8(raw, dir + "/labels/0.png");
  io::DepthImage depth(8, 6, 1000);
  io::write_png16(depth, dir + "/depth/0.png");
  {
    std::ofstream map(dir + "/labels/map.json");
    map << R"({"200": 1})";
  }
  auto loaded = io::load_cameras(dir + "/cameras.json");
  io::load_frame_images(loaded, dir);
  REQUIRE(loaded[0].pixel_labels.has_value());
  CHECK(loaded[0].pixel_labels->at(3, 3) == static_cast<int>(io::SemanticClass::Wall));
}

TEST_CASE("scene graph JSON round trip is byte stable") {
  std::string dir = temp_dir();
  io::SceneGraph g;
  g.levels = {{0, 0.0}, {1, 2.71}};
  io::SceneRoom room;
  room.id = 0;
  room.level_id = 0;
  room.floor = {{0, 0, 0}, {4, 0, 0}, {4, 3, 0}, {0, 3, 0}};
  room.walls = {{{0, 0, 0}, {4, 0, 0}, {4, 0, 2.5}, {0, 0, 2.5}}};
  room.ceilings = {{{0, 0, 2.5}, {4, 0, 2.5}, {4, 3, 2.5}, {0, 3, 2.5}}};
  room.windows.push_back({Vec3{1, 0, 1}, Vec3{2, 0, 1}, Vec3{2, 0, 2}, Vec3{1, 0, 2}});
  g.rooms.push_back(room);
  io::SceneRoom room2 = room;
  room2.id = 1;
  room2.level_id = 1;
  g.rooms.push_back(room2);
  io::SceneEdge e;
  e.kind = io::EdgeKind::Door;
  e.room_a = 0;
  e.room_b = 1;
  e.width_m = 0.9;
  e.geometry = {{1, 0, 0}, {1.9, 0, 0}, {1.9, 0, 2.1}, {1, 0, 2.1}};
  g.edges.push_back(e);
  g.validate();

  io::write_scene_graph(g, dir + "/a.json");
  io::SceneGraph loaded = io::load_scene_graph(dir + "/a.json");
  io::write_scene_graph(loaded, dir + "/b.json");
  CHECK(read_file(dir + "/a.json") == read_file(dir + "/b.json"));
  CHECK(loaded.rooms.size() == 2);
  CHECK(loaded.edges.size() == 1);
  CHECK(loaded.edges[0].kind == io::EdgeKind::Door);

  SUBCASE("empty graph writes valid JSON") {
    io::SceneGraph empty;
    io::write_scene_graph(empty, dir + "/empty.json");
    io::SceneGraph back = io::load_scene_graph(dir + "/empty.json");
    CHECK(back.rooms.empty());
    CHECK(back.edges.empty());
  }
  SUBCASE("door wider than 1.5 fails validation") {
    io::SceneGraph bad = g;
    bad.edges[0].width_m = 1.5;
    CHECK_THROWS_AS(bad.validate(), InvariantError);
  }
  SUBCASE("edge referencing a missing room fails validation") {
    io::SceneGraph bad = g;
    bad.edges[0].room_b = 99;
    CHECK_THROWS_AS(bad.validate(), InvariantError);
  }
}

TEST_CASE("layout OBJ export") {
  std::string dir = temp_dir();
  std::vector<io::ExportPolygon> polys;
  polys.push_back({static_cast<int>(io::SemanticClass::Wall),
                   {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}});
  polys.push_back({static_cast<int>(io::SemanticClass::Floor),
                   {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}});
  io::write_layout_obj(polys, dir + "/layout.obj");
  std::string text = read_file(dir + "/layout.obj");
  CHECK(text.find("g wall_0") != std::string::npos);
  CHECK(text.find("g floor_0") != std::string::npos);
  // quad fan-triangulated into two faces plus one triangle face
  int faces = 0;
  for (std::size_t pos = 0; (pos = text.find("\nf ", pos)) != std::string::npos; ++pos) ++faces;
  CHECK(faces == 3);
}
