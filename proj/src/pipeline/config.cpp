#include "layoutkit/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "layoutkit/log.hpp"

namespace layoutkit::pipeline {

void PipelineConfig::validate() const {
  fit.validate();
  if (pixels_per_frame <= 0) throw InputError("pixels_per_frame must be positive");
  if (segment_stride <= 0) throw InputError("segment_stride must be positive");
  if (graph.cell_size <= 0 || graph.level_merge <= 0)
    throw InputError("graph thresholds must be positive");
  if (f1_thresholds.empty()) throw InputError("f1_thresholds must not be empty");
}

namespace {

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      auto end = s.find_last_not_of(" \t\r");
      s.erase(end == std::string::npos ? 0 : end + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "theta_sp_deg") cfg.superpoints.normal_angle_deg = std::stod(value);
      else if (key == "delta_sp") cfg.superpoints.plane_dist = std::stod(value);
      else if (key == "superpoint_min_vertices") cfg.superpoints.min_vertices = std::stoi(value);
      else if (key == "pixels_per_frame") cfg.pixels_per_frame = std::stoi(value);
      else if (key == "segment_stride") cfg.segment_stride = std::stoi(value);
      else if (key == "tau_inter") cfg.fit.tau_inter = std::stod(value);
      else if (key == "tau_merge") cfg.fit.tau_merge = std::stod(value);
      else if (key == "tau_extend") cfg.fit.tau_extend = std::stod(value);
      else if (key == "tau_connect") cfg.fit.tau_connect = std::stod(value);
      else if (key == "step_size") cfg.fit.step_size = std::stod(value);
      else if (key == "n_iters") cfg.fit.n_iters = std::stoi(value);
      else if (key == "merge_period") cfg.fit.merge_period = std::stoi(value);
      else if (key == "w_prox") cfg.fit.w_prox = std::stod(value);
      else if (key == "w_empty") cfg.fit.w_empty = std::stod(value);
      else if (key == "w_connect") cfg.fit.w_connect = std::stod(value);
      else if (key == "w_simple") cfg.fit.w_simple = std::stod(value);
      else if (key == "alpha_hull") cfg.fit.alpha_hull = std::stod(value);
      else if (key == "max_skeleton_points") cfg.fit.max_skeleton_points = std::stoi(value);
      else if (key == "ransac_trials") cfg.fit.ransac_trials = std::stoi(value);
      else if (key == "min_polygon_points") cfg.fit.min_polygon_points = std::stoi(value);
      else if (key == "level_merge") cfg.graph.level_merge = std::stod(value);
      else if (key == "cell_size") cfg.graph.cell_size = std::stod(value);
      else if (key == "wall_thickness") cfg.graph.wall_thickness = std::stod(value);
      else if (key == "seed_separation") cfg.graph.seed_separation = std::stod(value);
      else if (key == "room_rdp") cfg.graph.room_rdp = std::stod(value);
      else if (key == "door_width_max") cfg.graph.door_width_max = std::stod(value);
      else if (key == "door_height") cfg.graph.door_height = std::stod(value);
      else if (key == "default_ceiling") cfg.graph.default_ceiling = std::stod(value);
      else if (key == "max_ceilings") cfg.graph.max_ceilings = std::stoi(value);
      else if (key == "min_stair_vertices") cfg.graph.min_stair_vertices = std::stoi(value);
      else if (key == "window_min_cluster") cfg.graph.window_min_cluster = std::stoi(value);
      else if (key == "window_min_size") cfg.graph.window_min_size = std::stod(value);
      else if (key == "window_dbscan_eps") cfg.graph.window_dbscan_eps = std::stod(value);
      else if (key == "window_dbscan_minpts") cfg.graph.window_dbscan_minpts = std::stoi(value);
      else if (key == "lof_k") cfg.graph.lof_k = std::stoi(value);
      else if (key == "lof_threshold") cfg.graph.lof_threshold = std::stod(value);
      else if (key == "window_pixel_stride") cfg.graph.window_pixel_stride = std::stoi(value);
      else if (key == "f1_thresholds") cfg.f1_thresholds = parse_list(value);
      else if (key == "depth_taus_cm") cfg.depth_taus_cm = parse_list(value);
      else throw InputError("unknown config key: " + key);
    } catch (const InputError&) {
      throw;
    } catch (const std::exception&) {
      throw InputError("config line " + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_schema() {
  return
      "seed, threads\n"
      "theta_sp_deg, delta_sp, superpoint_min_vertices, pixels_per_frame, segment_stride\n"
      "tau_inter, tau_merge, tau_extend, tau_connect, step_size, n_iters, merge_period\n"
      "w_prox, w_empty, w_connect, w_simple, alpha_hull, max_skeleton_points,\n"
      "ransac_trials, min_polygon_points\n"
      "level_merge, cell_size, wall_thickness, seed_separation, room_rdp,\n"
      "door_width_max, door_height, default_ceiling, max_ceilings, min_stair_vertices\n"
      "window_min_cluster, window_min_size, window_dbscan_eps, window_dbscan_minpts,\n"
      "lof_k, lof_threshold, window_pixel_stride\n"
      "f1_thresholds (comma list), depth_taus_cm (comma list)\n";
}

}  // namespace layoutkit::pipeline
