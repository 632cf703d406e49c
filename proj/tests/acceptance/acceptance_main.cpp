// Acceptance suite: one pass/fail line per criterion, exit nonzero when any
// criterion fails. Criteria run on generated synthetic scenes with every
// tolerance pinned in code.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "layoutkit/eval/depth.hpp"
#include "layoutkit/eval/metrics.hpp"
#include "layoutkit/fit/holes.hpp"
#include "layoutkit/fit/init.hpp"
#include "layoutkit/fit/losses.hpp"
#include "layoutkit/fit/optimize.hpp"
#include "layoutkit/graph/extrude.hpp"
#include "layoutkit/io/scene_graph.hpp"
#include "layoutkit/pipeline/run.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace layoutkit;
using geom::Vec2;
using geom::Vec3;

namespace {

struct Criterion {
  const char* name;
  double time_limit_s;
  std::function<bool(std::string&)> run;
};

std::string scratch_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("lk_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

pipeline::PipelineConfig fast_config() {
  pipeline::PipelineConfig cfg;
  cfg.fit.n_iters = 40;
  cfg.fit.merge_period = 20;
  cfg.fit.max_skeleton_points = 12000;
  cfg.segment_stride = 8;
  return cfg;
}

std::string write_fast_config(const std::string& dir) {
  std::string path = dir + "/config.txt";
  std::ofstream out(path);
  out << "n_iters = 40\nmerge_period = 20\nmax_skeleton_points = 12000\n"
         "segment_stride = 8\nseed = 7\n";
  return path;
}

// ---- criterion 1: gradient correctness ------------------------------------

struct GradConfig {
  fit::PrototypeSet set;
  std::vector<Vec3> skel;
  std::vector<io::ObservationSegment> segs;
};

GradConfig random_grad_config(int seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  GradConfig c;
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
      poly.ring.push_back(static_cast<std::uint32_t>(c.set.vertices.size()));
      c.set.vertices.push_back(center + basis[0] * (rad * std::cos(ang)) +
                               basis[1] * (rad * std::sin(ang)));
    }
    c.set.polygons.push_back(poly);
  }
  fit::project_all_vertices(c.set);
  for (int i = 0; i < 30; ++i)
    c.skel.push_back(Vec3{2.5 * uni(rng), 2.5 * uni(rng), 2.5 * uni(rng)});
  for (int i = 0; i < 25; ++i)
    c.segs.push_back({Vec3{3 * uni(rng), 3 * uni(rng), 3 * uni(rng)},
                      Vec3{3 * uni(rng), 3 * uni(rng), 3 * uni(rng)}});
  return c;
}

double grad_loss(const GradConfig& c, int which, const fit::FitConfig& cfg) {
  fit::PrototypeSet s = c.set;
  fit::project_all_vertices(s);
  fit::FitState st = fit::FitState::build(s, false);
  switch (which) {
    case 0: return fit::loss_prox(st, c.skel, nullptr, ExecMode::Serial);
    case 1: return fit::loss_empty(st, c.segs, cfg.tau_inter, nullptr, ExecMode::Serial);
    case 2: return fit::loss_connect(st, cfg.tau_connect, nullptr, ExecMode::Serial);
    default: return fit::loss_simple(st, nullptr, ExecMode::Serial);
  }
}

bool criterion_gradients(std::string& detail) {
  const double h = 1e-6;
  fit::FitConfig cfg;
  double worst = 0.0;
  for (int which = 0; which < 4; ++which) {
    for (int trial = 0; trial < 20; ++trial) {
      GradConfig c = random_grad_config(trial * 17 + 3);
      fit::FitState st = fit::FitState::build(c.set, true);
      fit::FitGradient grad;
      grad.resize(c.set);
      switch (which) {
        case 0: fit::loss_prox(st, c.skel, &grad, ExecMode::Serial); break;
        case 1: fit::loss_empty(st, c.segs, cfg.tau_inter, &grad, ExecMode::Serial); break;
        case 2: fit::loss_connect(st, cfg.tau_connect, &grad, ExecMode::Serial); break;
        default: fit::loss_simple(st, &grad, ExecMode::Serial); break;
      }
      double norm_fd = 0.0, diff = 0.0;
      for (std::size_t v = 0; v < c.set.vertices.size(); ++v) {
        for (int k = 0; k < 3; ++k) {
          GradConfig cp = c, cm = c;
          cp.set.vertices[v][k] += h;
          cm.set.vertices[v][k] -= h;
          double fd = (grad_loss(cp, which, cfg) - grad_loss(cm, which, cfg)) / (2 * h);
          norm_fd = std::max(norm_fd, std::abs(fd));
          diff = std::max(diff, std::abs(fd - grad.d_vertex[v][k]));
        }
      }
      for (std::size_t p = 0; p < c.set.polygons.size(); ++p) {
        auto basis = c.set.polygons[p].plane.basis();
        for (int k = 0; k < 3; ++k) {
          GradConfig cp = c, cm = c;
          auto perturb = [&](GradConfig& cc, double delta) {
            geom::Plane& pl = cc.set.polygons[p].plane;
            if (k == 0) pl.normal = geom::normalized(pl.normal + basis[0] * delta);
            else if (k == 1) pl.normal = geom::normalized(pl.normal + basis[1] * delta);
            else pl.offset += delta;
          };
          perturb(cp, h);
          perturb(cm, -h);
          double fd = (grad_loss(cp, which, cfg) - grad_loss(cm, which, cfg)) / (2 * h);
          norm_fd = std::max(norm_fd, std::abs(fd));
          diff = std::max(diff, std::abs(fd - grad.d_plane[p][k]));
        }
      }
      double rel = diff / std::max(norm_fd, 1e-8);
      worst = std::max(worst, rel);
      if (rel > 1e-4) {
        detail = "loss " + std::to_string(which) + " trial " + std::to_string(trial) +
                 " rel err " + std::to_string(rel);
        return false;
      }
    }
  }
  std::ostringstream os;
  os << "worst rel err " << worst;
  detail = os.str();
  return true;
}

// ---- criterion 2: box-room recovery ---------------------------------------

bool criterion_box_room(std::string& detail) {
  std::string dir = scratch_dir("box");
  auto scene = testsupport::box_room_scene();
  testsupport::write_scene_dir(scene, dir + "/scene", 0.02);
  testsupport::write_gt_entities(scene.gt_entities, dir + "/gt.json");

  pipeline::RunOptions opt;
  opt.scene_dir = dir + "/scene";
  opt.out_dir = dir + "/out";
  opt.config = fast_config();
  opt.stage = pipeline::Stage::All;
  if (pipeline::run_pipeline(opt) != 0) {
    detail = "pipeline failed";
    return false;
  }

  io::SceneGraph graph = io::load_scene_graph(dir + "/out/scene_graph.json");
  if (graph.rooms.size() != 1) {
    detail = "expected 1 room, got " + std::to_string(graph.rooms.size());
    return false;
  }

  auto pred = eval::entities_from_scene_graph(graph);
  std::vector<eval::ClassF1> per_class;
  eval::match_and_f1(pred, scene.gt_entities, 0.1, &per_class);
  for (const auto& rec : per_class) {
    if (rec.sem_class != io::SemanticClass::Wall && rec.sem_class != io::SemanticClass::Floor &&
        rec.sem_class != io::SemanticClass::Ceiling)
      continue;
    if (rec.f1 != 1.0) {
      detail = std::string("F1@0.1 for ") + io::semantic_class_name(rec.sem_class) + " = " +
               std::to_string(rec.f1);
      return false;
    }
  }

  // every matched polygon within 5 cm Hausdorff
  double worst_dh = 0.0;
  for (const auto& gt : scene.gt_entities) {
    double best = 1e300;
    for (const auto& pe : pred) {
      if (pe.sem_class != gt.sem_class) continue;
      try {
        best = std::min(best, eval::entity_distance_poly(pe, gt));
      } catch (const std::exception&) {
      }
    }
    worst_dh = std::max(worst_dh, best);
  }
  if (worst_dh > 0.05) {
    detail = "worst matched d_H " + std::to_string(worst_dh);
    return false;
  }
  std::ostringstream os;
  os << "1 room, per-class F1@0.1 = 1, worst d_H " << worst_dh;
  detail = os.str();
  return true;
}

// ---- criterion 3: two rooms and a door ------------------------------------

bool criterion_two_rooms(std::string& detail) {
  std::string dir = scratch_dir("two_rooms");
  auto scene = testsupport::two_room_scene(0.9);
  testsupport::write_scene_dir(scene, dir + "/scene", 0.025);

  pipeline::RunOptions opt;
  opt.scene_dir = dir + "/scene";
  opt.out_dir = dir + "/out";
  opt.config = fast_config();
  opt.stage = pipeline::Stage::All;
  if (pipeline::run_pipeline(opt) != 0) {
    detail = "pipeline failed";
    return false;
  }
  io::SceneGraph graph = io::load_scene_graph(dir + "/out/scene_graph.json");
  if (graph.rooms.size() != 2) {
    detail = "expected 2 rooms, got " + std::to_string(graph.rooms.size());
    return false;
  }
  int doors = 0;
  double width = 0;
  for (const auto& e : graph.edges) {
    if (e.kind == io::EdgeKind::Door) {
      ++doors;
      width = e.width_m;
    }
  }
  if (doors != 1 || graph.edges.size() != 1) {
    detail = "expected exactly 1 door edge, got " + std::to_string(graph.edges.size()) +
             " edges with " + std::to_string(doors) + " doors";
    return false;
  }
  if (std::abs(width - 0.9) > 0.1) {
    detail = "door width " + std::to_string(width);
    return false;
  }
  std::ostringstream os;
  os << "2 rooms, 1 door of width " << width;
  detail = os.str();
  return true;
}

// ---- criterion 4: two floors and stairs -----------------------------------

bool criterion_two_floors(std::string& detail) {
  std::string dir = scratch_dir("two_floors");
  auto scene = testsupport::two_floor_scene();
  testsupport::write_scene_dir(scene, dir + "/scene", 0.03);

  pipeline::RunOptions opt;
  opt.scene_dir = dir + "/scene";
  opt.out_dir = dir + "/out";
  opt.config = fast_config();
  opt.stage = pipeline::Stage::All;
  if (pipeline::run_pipeline(opt) != 0) {
    detail = "pipeline failed";
    return false;
  }
  io::SceneGraph graph = io::load_scene_graph(dir + "/out/scene_graph.json");
  if (graph.levels.size() != 2) {
    detail = "expected 2 levels, got " + std::to_string(graph.levels.size());
    return false;
  }
  int stairs = 0;
  bool connects = false;
  for (const auto& e : graph.edges) {
    if (e.kind != io::EdgeKind::Stairs) continue;
    ++stairs;
    int la = -1, lb = -1;
    for (const auto& r : graph.rooms) {
      if (r.id == e.room_a) la = r.level_id;
      if (r.id == e.room_b) lb = r.level_id;
    }
    connects = la != lb && la >= 0 && lb >= 0;
  }
  if (stairs != 1 || !connects) {
    detail = "stair edges " + std::to_string(stairs) + (connects ? "" : " (not cross-level)");
    return false;
  }
  detail = "2 levels, 1 stairs edge across levels";
  return true;
}

// ---- criterion 5: hole closing --------------------------------------------

bool criterion_hole_closing(std::string& detail) {
  // floor with a 1 m^2 notch under an object box
  fit::PrototypeSet set;
  geom::Polygon3 floor;
  floor.plane = {{0, 0, 1}, 0};
  floor.sem_class = static_cast<int>(io::SemanticClass::Floor);
  for (auto [x, y] : {std::pair{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0}, {0.0, 3.0},
                      {0.0, 2.0}, {1.0, 2.0}, {1.0, 1.0}, {0.0, 1.0}}) {
    floor.ring.push_back(static_cast<std::uint32_t>(set.vertices.size()));
    set.vertices.push_back({x, y, 0});
  }
  set.polygons.push_back(floor);

  using SC = io::SemanticClass;
  std::vector<testsupport::SurfaceQuad> box = {
      {{-0.05, 0.95, 0.5}, {1.15, 0, 0}, {0, 1.15, 0}, SC::Object},
      {{-0.05, 0.95, 0.0}, {1.15, 0, 0}, {0, 0, 0.5}, SC::Object},
      {{-0.05, 2.10, 0.0}, {1.15, 0, 0}, {0, 0, 0.5}, SC::Object},
      {{-0.05, 0.95, 0.0}, {0, 1.15, 0}, {0, 0, 0.5}, SC::Object},
      {{1.10, 0.95, 0.0}, {0, 1.15, 0}, {0, 0, 0.5}, SC::Object},
  };
  io::LabeledMesh objects = testsupport::mesh_from_quads(box, 0.1);
  fit::close_floor_holes(set, objects);
  double area = 0;
  for (std::size_t p = 0; p < set.polygons.size(); ++p)
    if (set.polygons[p].sem_class == static_cast<int>(SC::Floor))
      area += fit::polygon_area_3d(set, p);
  if (std::abs(area - 12.0) > 0.12) {
    detail = "restored floor area " + std::to_string(area);
    return false;
  }

  // hovering wall: extended at zero crossings, kept open when pierced
  auto make_wall_set = [] {
    fit::PrototypeSet s;
    geom::Polygon3 f;
    f.plane = {{0, 0, 1}, 0};
    f.sem_class = static_cast<int>(io::SemanticClass::Floor);
    for (auto [x, y] : {std::pair{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0}, {0.0, 3.0}}) {
      f.ring.push_back(static_cast<std::uint32_t>(s.vertices.size()));
      s.vertices.push_back({x, y, 0});
    }
    s.polygons.push_back(f);
    geom::Polygon3 w;
    w.plane = {{0, 1, 0}, 0};
    w.sem_class = static_cast<int>(io::SemanticClass::Wall);
    for (auto [x, z] : {std::pair{0.0, 0.4}, {4.0, 0.4}, {4.0, 2.5}, {0.0, 2.5}}) {
      w.ring.push_back(static_cast<std::uint32_t>(s.vertices.size()));
      s.vertices.push_back({x, 0, z});
    }
    s.polygons.push_back(w);
    return s;
  };

  fit::PrototypeSet empty_set = make_wall_set();
  fit::close_wall_holes(empty_set, {}, 0.002);
  double min_z = 1e300;
  for (auto v : empty_set.polygons[1].ring)
    min_z = std::min(min_z, empty_set.vertices[v].z);
  if (std::abs(min_z) > 1e-6) {
    detail = "unpierced wall not extended (min z " + std::to_string(min_z) + ")";
    return false;
  }

  fit::PrototypeSet pierced_set = make_wall_set();
  std::vector<io::ObservationSegment> segs;
  for (int i = 0; i < 200; ++i) {  // 200 / 16000 cm^2 = 0.0125 per cm^2
    double x = 0.02 + 3.96 * i / 199.0;
    double z = 0.05 + 0.3 * ((i * 7) % 11) / 11.0;
    segs.push_back({{x, -1.0, z}, {x, 1.0, z}});
  }
  fit::close_wall_holes(pierced_set, segs, 0.002);
  double min_z2 = 1e300;
  for (auto v : pierced_set.polygons[1].ring)
    min_z2 = std::min(min_z2, pierced_set.vertices[v].z);
  if (std::abs(min_z2 - 0.4) > 1e-6) {
    detail = "pierced gap was extended (min z " + std::to_string(min_z2) + ")";
    return false;
  }
  detail = "floor restored, wall extension density gate holds";
  return true;
}

// ---- criterion 6: extrusion watertightness --------------------------------

bool criterion_extrusion(std::string& detail) {
  graph::GraphConfig cfg;
  std::mt19937 rng(2025);
  std::uniform_int_distribution<int> n_cand(1, 5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    // rectilinear staircase footprint
    std::uniform_int_distribution<int> cols(2, 6), height(2, 6);
    int nc = cols(rng);
    std::vector<int> hs(nc);
    for (int& h : hs) h = height(rng);
    geom::Ring2 ring;
    ring.push_back({0, 0});
    ring.push_back({static_cast<double>(nc), 0});
    for (int c = nc - 1; c >= 0; --c) {
      ring.push_back({static_cast<double>(c + 1), static_cast<double>(hs[c])});
      ring.push_back({static_cast<double>(c), static_cast<double>(hs[c])});
    }
    geom::Polygon2 footprint{geom::collapse_collinear(ring, 1e-12), {}};

    std::vector<graph::CeilingCandidate> candidates;
    int nk = n_cand(rng);
    for (int k = 0; k < nk; ++k) {
      graph::CeilingCandidate c;
      double slope = uni(rng) * 0.5;
      Vec3 n = geom::normalized(Vec3{slope * (uni(rng) - 0.5), slope * (uni(rng) - 0.5), 1.0});
      double zc = 2.0 + 1.5 * uni(rng);
      c.plane = {n, geom::dot(n, Vec3{nc * 0.5, 3.0, zc})};
      double x0 = uni(rng) * nc * 0.6 - 0.5, y0 = uni(rng) * 4.0 - 0.5;
      double x1 = x0 + 1.0 + uni(rng) * nc, y1 = y0 + 1.0 + uni(rng) * 6.0;
      c.footprint = geom::Polygon2{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}};
      c.area = (x1 - x0) * (y1 - y0);
      candidates.push_back(c);
    }

    graph::RoomShell shell;
    try {
      shell = graph::extrude_room(footprint, candidates, {{0, 0, 1}, 0}, cfg);
    } catch (const std::exception& e) {
      detail = "trial " + std::to_string(trial) + " threw: " + e.what();
      return false;
    }
    if (!graph::shell_watertight(shell)) {
      detail = "trial " + std::to_string(trial) + " not watertight";
      return false;
    }
    // single-valued ceiling at random interior points
    for (int probe = 0; probe < 40; ++probe) {
      Vec2 p{uni(rng) * nc, uni(rng) * 6.0};
      if (!geom::point_in_polygon_2d(p, footprint, 0.0)) continue;
      // stay away from footprint and candidate edges where a ray is ambiguous
      bool near_edge = false;
      auto near_ring = [&](const geom::Ring2& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          Vec2 a = r[i], b = r[(i + 1) % r.size()];
          Vec2 ab = b - a;
          double len2 = geom::norm2(ab);
          double t = len2 > 0 ? std::clamp(geom::dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
          if (geom::norm(p - (a + ab * t)) < 0.02) return true;
        }
        return false;
      };
      near_edge = near_ring(footprint.outer);
      for (const auto& c : candidates) near_edge = near_edge || near_ring(c.footprint.outer);
      if (near_edge) continue;
      int hits = graph::ceiling_hits(shell, p);
      if (hits != 1) {
        detail = "trial " + std::to_string(trial) + ": ceiling ray hit " +
                 std::to_string(hits) + " faces";
        return false;
      }
    }
  }
  detail = "50 shells watertight, ceilings single-valued";
  return true;
}

// ---- criterion 7: metric oracles ------------------------------------------

bool criterion_metric_oracles(std::string& detail) {
  // match_and_f1 vs exhaustive enumeration
  std::mt19937_64 rng(321);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_real_distribution<double> uni(-3.0, 3.0), tau_pick(0.1, 2.0);
  auto random_rects = [&](int n, io::SemanticClass cls) {
    std::vector<eval::LayoutEntity> out;
    for (int i = 0; i < n; ++i) {
      eval::LayoutEntity e;
      e.sem_class = cls;
      Vec3 o{uni(rng), uni(rng), uni(rng)};
      Vec3 eu{1.0 + 0.2 * uni(rng), 0, 0}, ev{0, 0, 1.0 + 0.2 * uni(rng)};
      e.corners = {o, o + eu, o + eu + ev, o + ev};
      out.push_back(e);
    }
    return out;
  };
  for (int trial = 0; trial < 200; ++trial) {
    auto pred = random_rects(count(rng), io::SemanticClass::Door);
    auto gt = random_rects(count(rng), io::SemanticClass::Door);
    double tau = tau_pick(rng);
    double fast = eval::match_and_f1(pred, gt, tau);
    double slow = testsupport::brute_force_f1(pred, gt, tau);
    if (std::abs(fast - slow) > 1e-12) {
      detail = "matching mismatch at trial " + std::to_string(trial);
      return false;
    }
  }

  // point-to-polygon distance vs dense sampling
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 n = geom::normalized(Vec3{uni(rng), uni(rng), uni(rng) + 4.0});
    geom::Plane pl{n, uni(rng) * 0.5};
    auto basis = pl.basis();
    std::vector<Vec3> ring;
    for (int k = 0; k < 4; ++k) {
      double ang = 2 * M_PI * k / 4 + 0.1 * uni(rng);
      double rad = 1.0 + 0.15 * uni(rng);
      ring.push_back(pl.to_world({rad * std::cos(ang), rad * std::sin(ang)}, basis));
    }
    Vec3 p{uni(rng), uni(rng), uni(rng)};
    double got = geom::point_to_polygon_distance(p, {ring, pl});
    double oracle = testsupport::dpp_sampling_oracle(p, ring, 1000000, trial + 9000);
    if (std::abs(got - oracle) > 1e-3) {
      detail = "distance oracle gap " + std::to_string(std::abs(got - oracle));
      return false;
    }
  }

  // rasterizer vs ray-cast oracle
  for (int scene_i = 0; scene_i < 10; ++scene_i) {
    std::vector<eval::Triangle> tris;
    for (int b = 0; b < 6; ++b) {
      Vec3 o{uni(rng), uni(rng), uni(rng)};
      Vec3 eu{1.0 + 0.3 * uni(rng), 0.2 * uni(rng), 0};
      Vec3 ev{0, 1.0 + 0.3 * uni(rng), 0.2 * uni(rng)};
      tris.push_back({o, o + eu, o + eu + ev});
      tris.push_back({o, o + eu + ev, o + ev});
    }
    auto frames = testsupport::camera_ring({0, 0, 0.2}, 2, 120, 90, 70.0);
    for (const auto& f : frames) {
      auto raster = eval::render_depth(tris, f);
      auto cast = eval::render_depth_raycast(tris, f);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < raster.size(); ++i) {
        bool rv = raster[i] > 0, cv = cast[i] > 0;
        if (!rv && !cv) { ++agree; continue; }
        if (rv && cv && std::abs(static_cast<double>(raster[i]) - cast[i]) <= 1e-4) ++agree;
      }
      if (static_cast<double>(agree) / raster.size() < 0.999) {
        detail = "raster/raycast agreement " +
                 std::to_string(static_cast<double>(agree) / raster.size());
        return false;
      }
    }
  }
  detail = "matching, distance and depth oracles agree";
  return true;
}

// ---- criterion 8: metric identities ----------------------------------------

bool criterion_metric_identities(std::string& detail) {
  eval::DepthMap d(256, 1.7f);
  if (eval::depth_delta(d, d, 5.0) != 100.0) {
    detail = "delta(D,D) != 100";
    return false;
  }
  std::vector<Vec3> square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  geom::Plane z0{{0, 0, 1}, 0};
  if (geom::polygon_hausdorff({square, z0}, {square, z0}) != 0.0) {
    detail = "d_H(P,P) != 0";
    return false;
  }
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::vector<eval::LayoutEntity> ents;
  for (int i = 0; i < 5; ++i) {
    eval::LayoutEntity e;
    e.sem_class = io::SemanticClass::Door;
    Vec3 o{uni(rng), uni(rng), uni(rng)};
    e.corners = {o, o + Vec3{1, 0, 0}, o + Vec3{1, 0, 1}, o + Vec3{0, 0, 1}};
    ents.push_back(e);
  }
  const std::vector<double> t_avg{0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  for (double tau : t_avg) {
    if (eval::match_and_f1(ents, ents, tau) != 1.0) {
      detail = "F1(pred=gt) != 1 at tau " + std::to_string(tau);
      return false;
    }
  }
  auto other = ents;
  for (auto& e : other)
    for (auto& c : e.corners) c += Vec3{uni(rng) * 0.3, 0, uni(rng) * 0.3};
  double prev = -1.0;
  for (double tau : t_avg) {
    double f1 = eval::match_and_f1(ents, other, tau);
    if (f1 < prev - 1e-12) {
      detail = "F1 not monotone in tau";
      return false;
    }
    prev = f1;
  }
  detail = "delta/d_H/F1 identities hold";
  return true;
}

// ---- criterion 9: optimizer contract ---------------------------------------

bool criterion_optimizer(std::string& detail) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    // jittered box prototypes over sampled box surfaces
    fit::PrototypeSet set;
    auto add = [&](double x, double y, double z) {
      set.vertices.push_back({x, y, z});
      return static_cast<std::uint32_t>(set.vertices.size() - 1);
    };
    double w = 2.0 + trial * 0.3, d = 2.0, h = 2.2;
    std::uint32_t c[2][2][2];
    for (int z = 0; z < 2; ++z)
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) c[z][y][x] = add(x * w, y * d, z * h);
    auto poly = [&](std::vector<std::uint32_t> ring, Vec3 n, double off, int cls) {
      geom::Polygon3 p;
      p.ring = std::move(ring);
      p.plane = {n, off};
      p.sem_class = cls;
      set.polygons.push_back(p);
    };
    poly({c[0][0][0], c[0][0][1], c[0][1][1], c[0][1][0]}, {0, 0, 1}, 0, 2);
    poly({c[1][0][0], c[1][0][1], c[1][1][1], c[1][1][0]}, {0, 0, 1}, h, 3);
    poly({c[0][0][0], c[0][0][1], c[1][0][1], c[1][0][0]}, {0, 1, 0}, 0, 1);
    poly({c[0][1][0], c[0][1][1], c[1][1][1], c[1][1][0]}, {0, 1, 0}, d, 1);
    poly({c[0][0][0], c[0][1][0], c[1][1][0], c[1][0][0]}, {1, 0, 0}, 0, 1);
    poly({c[0][0][1], c[0][1][1], c[1][1][1], c[1][0][1]}, {1, 0, 0}, w, 1);
    for (auto& v : set.vertices) v += Vec3{jitter(rng), jitter(rng), jitter(rng)};
    for (auto& p : set.polygons) {
      p.plane.normal = geom::normalized(
          p.plane.normal + Vec3{jitter(rng), jitter(rng), jitter(rng)} * 0.4);
      p.plane.offset += jitter(rng);
    }
    fit::project_all_vertices(set);

    std::vector<Vec3> skel_pts;
    for (double x = 0.05; x < w; x += 0.15)
      for (double y = 0.05; y < d; y += 0.15) {
        skel_pts.push_back({x, y, 0});
        skel_pts.push_back({x, y, h});
      }
    for (double x = 0.05; x < w; x += 0.15)
      for (double z = 0.05; z < h; z += 0.15) {
        skel_pts.push_back({x, 0, z});
        skel_pts.push_back({x, d, z});
      }

    fit::FitConfig cfg;
    cfg.n_iters = 60;
    cfg.merge_period = 25;
    auto report = fit::optimize(set, skel_pts, {}, cfg);
    if (!report.monotone_steps) {
      detail = "loss increased on an accepted step (trial " + std::to_string(trial) + ")";
      return false;
    }
    if (report.max_projection_residual > fit::kFitTol) {
      detail = "projection residual " + std::to_string(report.max_projection_residual);
      return false;
    }
  }
  detail = "loss non-increasing, residual <= 1e-4 on all runs";
  return true;
}

// ---- criterion 10: determinism ---------------------------------------------

bool criterion_determinism(std::string& detail) {
#ifndef LK_CLI_PATH
  detail = "CLI path not configured";
  return false;
#else
  std::string dir = scratch_dir("determinism");
  auto scene = testsupport::box_room_scene();
  testsupport::write_scene_dir(scene, dir + "/scene", 0.03);
  std::string config_path = write_fast_config(dir);

  auto run_once = [&](const std::string& out) {
    std::string cmd = std::string(LK_CLI_PATH) + " pipeline " + dir + "/scene " + out +
                      " --config " + config_path + " --seed 7 > " + out + ".log 2>&1";
    return std::system(cmd.c_str());
  };
  if (run_once(dir + "/out1") != 0 || run_once(dir + "/out2") != 0) {
    detail = "CLI run failed";
    return false;
  }
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = slurp(dir + "/out1/scene_graph.json");
  std::string b = slurp(dir + "/out2/scene_graph.json");
  if (a.empty() || a != b) {
    detail = "scene_graph.json differs between runs";
    return false;
  }
  detail = "byte-identical scene_graph.json across runs";
  return true;
#endif
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"1 gradient correctness (FD, rel err <= 1e-4)", 30.0, criterion_gradients},
      {"2 box-room recovery (1 room, F1@0.1 = 1, d_H <= 0.05)", 60.0, criterion_box_room},
      {"3 two rooms + door (0.9 m +- 0.1)", 60.0, criterion_two_rooms},
      {"4 two floors + stairs edge", 90.0, criterion_two_floors},
      {"5 hole closing (floor area, wall extension gate)", 60.0, criterion_hole_closing},
      {"6 extrusion watertightness (50 random rooms)", 60.0, criterion_extrusion},
      {"7 metric oracles (matching, distance, depth)", 120.0, criterion_metric_oracles},
      {"8 metric identities", 30.0, criterion_metric_identities},
      {"9 optimizer contract (monotone, residual <= 1e-4)", 120.0, criterion_optimizer},
      {"10 determinism (byte-identical scene graph)", 120.0, criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && secs > c.time_limit_s) {
      ok = false;
      detail += " (over time limit)";
    }
    std::printf("[%s] criterion %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
