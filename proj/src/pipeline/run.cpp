#include "layoutkit/pipeline/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "layoutkit/eval/depth.hpp"
#include "layoutkit/eval/metrics.hpp"
#include "layoutkit/fit/holes.hpp"
#include "layoutkit/fit/init.hpp"
#include "layoutkit/fit/optimize.hpp"
#include "layoutkit/graph/assemble.hpp"
#include "layoutkit/graph/features.hpp"
#include "layoutkit/graph/rooms.hpp"
#include "layoutkit/io/export.hpp"
#include "layoutkit/io/observation.hpp"
#include "layoutkit/log.hpp"
#include "layoutkit/parallel.hpp"
#include "layoutkit/skel/skeleton.hpp"

namespace layoutkit::pipeline {

namespace fs = std::filesystem;
using geom::Vec2;
using geom::Vec3;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void require_exists(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw InputError(std::string("missing ") + what + ": " + path);
}

std::vector<io::CameraFrame> load_scene_cameras(const RunOptions& opt) {
  std::string cam_path = join(opt.scene_dir, "cameras.json");
  require_exists(cam_path, "cameras.json");
  auto frames = io::load_cameras(cam_path);
  io::load_frame_images(frames, opt.scene_dir);
  return frames;
}

// Deterministic subsample of skeleton vertices for L_prox.
std::vector<Vec3> subsample_points(const std::vector<Vec3>& pts, int max_count) {
  if (static_cast<int>(pts.size()) <= max_count) return pts;
  std::vector<Vec3> out;
  out.reserve(max_count);
  double step = static_cast<double>(pts.size()) / max_count;
  for (int i = 0; i < max_count; ++i)
    out.push_back(pts[static_cast<std::size_t>(i * step)]);
  return out;
}

void write_superpoints(const skel::SkeletonBundle& bundle, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["count"] = bundle.superpoints.size();
  auto& sps = doc["superpoints"] = nlohmann::ordered_json::array();
  for (const skel::Superpoint& sp : bundle.superpoints) {
    nlohmann::ordered_json rec;
    rec["id"] = sp.id;
    rec["label"] = static_cast<int>(sp.label);
    rec["normal"] = {sp.plane.normal.x, sp.plane.normal.y, sp.plane.normal.z};
    rec["offset"] = sp.plane.offset;
    rec["vertices"] = sp.vertices;
    sps.push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write superpoints: " + path);
  out << doc.dump() << "\n";
}

std::vector<skel::Superpoint> load_superpoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open superpoints: " + path);
  nlohmann::json doc;
  in >> doc;
  std::vector<skel::Superpoint> out;
  for (const auto& rec : doc.at("superpoints")) {
    skel::Superpoint sp;
    sp.id = rec.at("id").get<int>();
    sp.label = static_cast<io::SemanticClass>(rec.at("label").get<int>());
    const auto& n = rec.at("normal");
    sp.plane.normal = geom::normalized(
        Vec3{n[0].get<double>(), n[1].get<double>(), n[2].get<double>()});
    sp.plane.offset = rec.at("offset").get<double>();
    for (const auto& v : rec.at("vertices")) sp.vertices.push_back(v.get<std::uint32_t>());
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace

void run_skeleton_stage(const RunOptions& opt) {
  std::string mesh_path = join(opt.scene_dir, "mesh.ply");
  require_exists(mesh_path, "mesh.ply");
  io::LabeledMesh mesh = io::load_labeled_mesh(mesh_path);
  LK_INFO("skeleton: %zu vertices, %zu triangles", mesh.vertex_count(), mesh.triangle_count());

  auto frames = load_scene_cameras(opt);
  bool have_labels = std::any_of(frames.begin(), frames.end(), [](const io::CameraFrame& f) {
    return f.pixel_labels.has_value() && f.depth.width > 0;
  });

  if (have_labels) {
    std::vector<io::LabeledPoint> points;
    for (const io::CameraFrame& f : frames) {
      if (!f.pixel_labels.has_value() || f.depth.width == 0) continue;
      auto pts = io::backproject_labeled_pixels(
          f, opt.config.pixels_per_frame,
          opt.config.seed ^ (0x01000193ULL * (static_cast<std::uint64_t>(f.id) + 1)));
      points.insert(points.end(), pts.begin(), pts.end());
    }
    LK_INFO("skeleton: voting %zu back-projected points", points.size());
    mesh.vertex_labels = skel::vote_vertex_labels(mesh, points);
  }

  auto superpoints = skel::compute_superpoints(mesh, opt.config.superpoints);
  mesh.vertex_labels = skel::refine_labels(mesh, superpoints);
  skel::SkeletonBundle bundle = skel::split_by_category(mesh, superpoints);
  LK_INFO("skeleton: %zu superpoints, structural %zu tris, objects %zu, stairs %zu, inaccurate %zu",
          bundle.superpoints.size(), bundle.structural.triangle_count(),
          bundle.objects.triangle_count(), bundle.stairs.triangle_count(),
          bundle.inaccurate.triangle_count());

  fs::create_directories(opt.out_dir);
  io::write_labeled_mesh(bundle.structural, join(opt.out_dir, "skeleton_structural.ply"));
  io::write_labeled_mesh(bundle.objects, join(opt.out_dir, "skeleton_objects.ply"));
  io::write_labeled_mesh(bundle.stairs, join(opt.out_dir, "skeleton_stairs.ply"));
  io::write_labeled_mesh(bundle.inaccurate, join(opt.out_dir, "skeleton_inaccurate.ply"));
  write_superpoints(bundle, join(opt.out_dir, "superpoints.json"));
}

void run_fit_stage(const RunOptions& opt) {
  skel::SkeletonBundle bundle;
  std::string structural_path = join(opt.out_dir, "skeleton_structural.ply");
  require_exists(structural_path, "skeleton stage output");
  bundle.structural = io::load_labeled_mesh(structural_path);
  bundle.objects = io::load_labeled_mesh(join(opt.out_dir, "skeleton_objects.ply"));
  bundle.superpoints = load_superpoints(join(opt.out_dir, "superpoints.json"));

  auto frames = load_scene_cameras(opt);
  auto segments = io::build_observation_segments(frames, opt.config.segment_stride);
  LK_INFO("fit: %zu observation segments", segments.size());

  fit::FitConfig fit_cfg = opt.config.fit;
  fit_cfg.seed = opt.config.seed;
  fit::PrototypeSet set = fit::init_polygons(bundle, fit_cfg, opt.config.superpoints);
  LK_INFO("fit: initialized %zu polygons, %zu vertices", set.polygons.size(),
          set.vertices.size());
  if (set.polygons.empty()) throw InputError("fit: no polygons could be initialized");

  std::vector<Vec3> skeleton_points =
      subsample_points(bundle.structural.vertices, fit_cfg.max_skeleton_points);

  auto report = fit::optimize(set, skeleton_points, segments, fit_cfg);
  LK_INFO("fit: final loss %.6f after %d accepted steps (monotone=%d, resid=%.2e)",
          report.final_loss, report.accepted_steps, report.monotone_steps ? 1 : 0,
          report.max_projection_residual);

  auto floor_report = fit::close_floor_holes(set, bundle.objects);
  LK_INFO("fit: floor holes: %d triangles projected, %d floors grown",
          floor_report.projected_triangles, floor_report.grown_floors);
  auto wall_report = fit::close_wall_holes(set, segments, fit_cfg.tau_extend);
  LK_INFO("fit: wall holes: %d edges extended, %d kept open", wall_report.extended_edges,
          wall_report.kept_open_edges);

  fit::compact(set);
  fit::write_prototype(set, join(opt.out_dir, "prototype.json"));
}

namespace {

struct GraphArtifacts {
  std::vector<graph::Level> levels;
  std::vector<graph::RoomRecord> rooms;
  std::vector<graph::PlacedOpening> openings;
  std::vector<graph::StairEdge> stairs;
  std::vector<graph::WindowRect> windows;
  io::SceneGraph scene_graph;
};

GraphArtifacts build_graph(const RunOptions& opt, const fit::PrototypeSet& proto,
                           const io::LabeledMesh& stairs_mesh,
                           const std::vector<io::CameraFrame>& frames) {
  const graph::GraphConfig& gcfg = opt.config.graph;
  GraphArtifacts art;
  art.levels = graph::detect_levels(proto, gcfg);
  for (graph::Level& level : art.levels)
    graph::build_floorplan(level, proto, art.levels, gcfg);
  LK_INFO("graph: %zu levels", art.levels.size());

  // Wall polygons per level: centroid height within the level span.
  std::vector<std::size_t> wall_ids;
  for (std::size_t p = 0; p < proto.polygons.size(); ++p)
    if (proto.polygons[p].sem_class == static_cast<int>(io::SemanticClass::Wall))
      wall_ids.push_back(p);

  for (const graph::Level& level : art.levels) {
    double lo = level.height - 0.2;
    double hi = level.id + 1 < static_cast<int>(art.levels.size())
                    ? art.levels[level.id + 1].height
                    : std::numeric_limits<double>::infinity();
    std::vector<std::size_t> level_walls;
    for (std::size_t p : wall_ids) {
      double z = fit::polygon_centroid(proto, p).z;
      if (z >= lo && z < hi) level_walls.push_back(p);
    }

    auto seg = graph::segment_rooms(level.floorplan, proto, level_walls, gcfg);
    LK_INFO("graph: level %d: %zu rooms, %zu openings", level.id, seg.rooms.size(),
            seg.openings.size());

    // Ceiling candidates shared by the level's rooms.
    std::vector<graph::CeilingCandidate> candidates;
    for (std::size_t p : level.ceiling_polys) {
      graph::CeilingCandidate c;
      c.plane = proto.polygons[p].plane;
      c.footprint = graph::polygon_xy(proto, p);
      c.area = fit::polygon_area_3d(proto, p);
      candidates.push_back(std::move(c));
    }
    // Floor plane per room: the level floor polygon containing its centroid.
    int base = static_cast<int>(art.rooms.size());
    for (const geom::Polygon2& footprint : seg.rooms) {
      graph::RoomRecord rec;
      rec.level_id = level.id;
      rec.footprint = footprint;
      Vec2 centroid{0, 0};
      for (const Vec2& p : footprint.outer) centroid += p;
      centroid = centroid / static_cast<double>(footprint.outer.size());
      geom::Plane floor_plane{Vec3{0, 0, 1}, level.height};
      for (std::size_t p : level.floor_polys) {
        geom::Polygon2 fp_xy = graph::polygon_xy(proto, p);
        if (geom::point_in_polygon_2d(centroid, fp_xy, 1e-9)) {
          floor_plane = proto.polygons[p].plane;
          break;
        }
      }
      rec.shell = graph::extrude_room(footprint, candidates, floor_plane, gcfg);
      art.rooms.push_back(std::move(rec));
    }
    for (const graph::Opening& op : seg.openings) {
      graph::PlacedOpening placed;
      placed.room_a = base + op.room_a;
      placed.room_b = base + op.room_b;
      placed.a = op.a;
      placed.b = op.b;
      placed.width = op.width;
      placed.floor_z = level.height;
      art.openings.push_back(placed);
    }
  }

  std::vector<graph::PlacedRoom> placed;
  for (const graph::RoomRecord& r : art.rooms) placed.push_back({r.level_id, r.footprint});
  art.stairs = graph::detect_stairs(stairs_mesh, placed, art.levels, gcfg);
  LK_INFO("graph: %zu stair edges", art.stairs.size());

  std::vector<graph::RoomShell> shells;
  for (const graph::RoomRecord& r : art.rooms) shells.push_back(r.shell);
  art.windows = graph::detect_windows(frames, shells, gcfg);
  LK_INFO("graph: %zu windows", art.windows.size());

  art.scene_graph =
      graph::assemble_scene_graph(art.levels, art.rooms, art.openings, art.stairs, art.windows,
                                  gcfg);
  return art;
}

std::vector<io::ExportPolygon> export_polygons(const io::SceneGraph& graph) {
  std::vector<io::ExportPolygon> out;
  for (const io::SceneRoom& r : graph.rooms) {
    out.push_back({static_cast<int>(io::SemanticClass::Floor), r.floor});
    for (const auto& w : r.walls)
      out.push_back({static_cast<int>(io::SemanticClass::Wall), w});
    for (const auto& c : r.ceilings)
      out.push_back({static_cast<int>(io::SemanticClass::Ceiling), c});
    for (const auto& w : r.windows)
      out.push_back({static_cast<int>(io::SemanticClass::Window), {w[0], w[1], w[2], w[3]}});
  }
  for (const io::SceneEdge& e : graph.edges) {
    if (e.kind == io::EdgeKind::Door)
      out.push_back({static_cast<int>(io::SemanticClass::Door), e.geometry});
    else if (e.kind == io::EdgeKind::Stairs)
      out.push_back({static_cast<int>(io::SemanticClass::Stairs), e.geometry});
  }
  return out;
}

std::vector<eval::Triangle> renderable_triangles(const io::SceneGraph& graph) {
  std::vector<std::vector<Vec3>> faces;
  for (const io::SceneRoom& r : graph.rooms) {
    faces.push_back(r.floor);
    for (const auto& w : r.walls) faces.push_back(w);
    for (const auto& c : r.ceilings) faces.push_back(c);
  }
  return eval::triangulate_faces(faces);
}

}  // namespace

void run_graph_stage(const RunOptions& opt) {
  std::string proto_path = join(opt.out_dir, "prototype.json");
  require_exists(proto_path, "fit stage output");
  fit::PrototypeSet proto = fit::load_prototype(proto_path);
  io::LabeledMesh stairs_mesh;
  std::string stairs_path = join(opt.out_dir, "skeleton_stairs.ply");
  if (fs::exists(stairs_path)) stairs_mesh = io::load_labeled_mesh(stairs_path);
  auto frames = load_scene_cameras(opt);

  GraphArtifacts art = build_graph(opt, proto, stairs_mesh, frames);
  io::write_scene_graph(art.scene_graph, join(opt.out_dir, "scene_graph.json"));
  io::write_layout_obj(export_polygons(art.scene_graph), join(opt.out_dir, "layout.obj"));
  for (const graph::Level& level : art.levels) {
    std::vector<geom::Polygon2> rooms;
    for (const graph::RoomRecord& r : art.rooms)
      if (r.level_id == level.id) rooms.push_back(r.footprint);
    io::write_floorplan_svg(rooms, level.floorplan,
                            join(opt.out_dir, "floorplan_" + std::to_string(level.id) + ".svg"));
  }
}

void run_eval_stage(const RunOptions& opt) {
  std::string graph_path = join(opt.out_dir, "scene_graph.json");
  require_exists(graph_path, "graph stage output");
  io::SceneGraph pred = io::load_scene_graph(graph_path);
  if (opt.gt_path.empty()) throw InputError("eval: --gt path required");
  require_exists(opt.gt_path, "ground truth");
  auto gt_entities = eval::load_entities(opt.gt_path);
  auto pred_entities = eval::entities_from_scene_graph(pred);

  eval::EvalReport report =
      eval::evaluate_layout(pred_entities, gt_entities, opt.config.f1_thresholds);
  report.vertex_count = pred.distinct_vertex_count();

  // Depth consistency when cameras exist: render both layouts per frame.
  // Structural surfaces only, so the two routes stay comparable (doors and
  // windows are coplanar holes, not depth geometry).
  std::string cam_path = join(opt.scene_dir, "cameras.json");
  if (fs::exists(cam_path)) {
    auto frames = io::load_cameras(cam_path);
    auto pred_tris = renderable_triangles(pred);
    std::vector<std::vector<Vec3>> gt_faces;
    for (const auto& e : gt_entities) {
      if (e.corners.size() < 3) continue;
      if (e.sem_class != io::SemanticClass::Wall && e.sem_class != io::SemanticClass::Floor &&
          e.sem_class != io::SemanticClass::Ceiling)
        continue;
      gt_faces.push_back(e.corners);
    }
    auto gt_tris = eval::triangulate_faces(gt_faces);
    if (!pred_tris.empty() && !gt_tris.empty() && !frames.empty()) {
      std::vector<std::size_t> n(opt.config.depth_taus_cm.size(), 0);
      std::vector<std::size_t> ok(opt.config.depth_taus_cm.size(), 0);
      for (const io::CameraFrame& f : frames) {
        auto dp = eval::render_depth(pred_tris, f);
        auto dg = eval::render_depth(gt_tris, f);
        for (std::size_t i = 0; i < dp.size(); ++i) {
          if (dp[i] <= 0 || dg[i] <= 0) continue;
          double diff = std::abs(static_cast<double>(dp[i]) - dg[i]);
          for (std::size_t ti = 0; ti < opt.config.depth_taus_cm.size(); ++ti) {
            ++n[ti];
            if (diff <= opt.config.depth_taus_cm[ti] / 100.0) ++ok[ti];
          }
        }
      }
      std::vector<double> deltas;
      for (std::size_t ti = 0; ti < n.size(); ++ti)
        deltas.push_back(n[ti] > 0 ? 100.0 * ok[ti] / n[ti] : -1.0);
      if (deltas.size() > 0) report.delta_5 = deltas[0];
      if (deltas.size() > 1) report.delta_10 = deltas[1];
    }
  }

  eval::write_eval_report(report, join(opt.out_dir, "eval_report.json"));
  std::string table = eval::format_eval_table(report);
  std::fputs(table.c_str(), stdout);
}

void run_render_depth_stage(const RunOptions& opt) {
  std::string graph_path = join(opt.out_dir, "scene_graph.json");
  require_exists(graph_path, "graph stage output");
  io::SceneGraph graph = io::load_scene_graph(graph_path);
  std::string cam_path = join(opt.scene_dir, "cameras.json");
  require_exists(cam_path, "cameras.json");
  auto frames = io::load_cameras(cam_path);
  auto tris = renderable_triangles(graph);

  fs::create_directories(join(opt.out_dir, "depth_render"));
  for (const io::CameraFrame& f : frames) {
    auto depth = eval::render_depth(tris, f);
    io::DepthImage img(f.width, f.height, 0);
    for (std::size_t i = 0; i < depth.size(); ++i) {
      double mm = depth[i] > 0 ? depth[i] * 1000.0 : 0.0;
      img.data[i] = static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0));
    }
    io::write_png16(img, join(opt.out_dir, "depth_render/" + std::to_string(f.id) + ".png"));
  }
}

int run_pipeline(const RunOptions& options) {
  try {
    set_thread_count(options.config.threads);
    fs::create_directories(options.out_dir);
    switch (options.stage) {
      case Stage::Skeleton: run_skeleton_stage(options); break;
      case Stage::Fit: run_fit_stage(options); break;
      case Stage::Graph: run_graph_stage(options); break;
      case Stage::Eval: run_eval_stage(options); break;
      case Stage::RenderDepth: run_render_depth_stage(options); break;
      case Stage::All:
        run_skeleton_stage(options);
        run_fit_stage(options);
        run_graph_stage(options);
        if (!options.gt_path.empty()) run_eval_stage(options);
        break;
    }
    return 0;
  } catch (const InvariantError& e) {
    LK_ERROR("invariant violation: %s", e.what());
    return 3;
  } catch (const InputError& e) {
    LK_ERROR("%s", e.what());
    return 2;
  } catch (const std::exception& e) {
    LK_ERROR("unexpected failure: %s", e.what());
    return 2;
  }
}

}  // namespace layoutkit::pipeline
