#include "layoutkit/io/camera.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "layoutkit/log.hpp"

namespace layoutkit::io {

using geom::Vec3;
namespace fs = std::filesystem;

bool RigidTransform::is_rigid(double tol) const {
  const auto& r = rotation_rows;
  double d = geom::dot(r[0], geom::cross(r[1], r[2]));
  if (std::abs(d - 1.0) > tol) return false;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(geom::dot(r[i], r[j]) - want) > tol) return false;
    }
  }
  return true;
}

std::vector<CameraFrame> load_cameras(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw InputError("cannot open cameras file: " + json_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw InputError(std::string("malformed cameras.json: ") + e.what());
  }
  if (!doc.is_array()) throw InputError("cameras.json must be a JSON array");

  std::vector<CameraFrame> frames;
  for (const auto& rec : doc) {
    CameraFrame f;
    f.id = rec.at("id").get<int>();
    f.width = rec.at("width").get<int>();
    f.height = rec.at("height").get<int>();
    f.fx = rec.at("fx").get<double>();
    f.fy = rec.at("fy").get<double>();
    f.cx = rec.at("cx").get<double>();
    f.cy = rec.at("cy").get<double>();
    const auto& m = rec.at("world_from_camera");
    if (!m.is_array() || m.size() != 16)
      throw InputError("world_from_camera must have 16 row-major floats");
    for (int r = 0; r < 3; ++r) {
      f.world_from_camera.rotation_rows[r] = Vec3{m[r * 4 + 0].get<double>(),
                                                  m[r * 4 + 1].get<double>(),
                                                  m[r * 4 + 2].get<double>()};
      f.world_from_camera.translation[r] = m[r * 4 + 3].get<double>();
    }
    if (!f.world_from_camera.is_rigid())
      throw InputError("world_from_camera is not a rigid transform (frame " +
                       std::to_string(f.id) + ")");
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_cameras(const std::vector<CameraFrame>& frames, const std::string& json_path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const CameraFrame& f : frames) {
    nlohmann::ordered_json rec;
    rec["id"] = f.id;
    rec["width"] = f.width;
    rec["height"] = f.height;
    rec["fx"] = f.fx;
    rec["fy"] = f.fy;
    rec["cx"] = f.cx;
    rec["cy"] = f.cy;
    std::vector<double> m(16, 0.0);
    for (int r = 0; r < 3; ++r) {
      m[r * 4 + 0] = f.world_from_camera.rotation_rows[r].x;
      m[r * 4 + 1] = f.world_from_camera.rotation_rows[r].y;
      m[r * 4 + 2] = f.world_from_camera.rotation_rows[r].z;
      m[r * 4 + 3] = f.world_from_camera.translation[r];
    }
    m[15] = 1.0;
    rec["world_from_camera"] = m;
    doc.push_back(rec);
  }
  std::ofstream out(json_path);
  if (!out) throw InputError("cannot write cameras file: " + json_path);
  out << doc.dump(2) << "\n";
}

void load_frame_images(std::vector<CameraFrame>& frames, const std::string& scene_dir) {
  // Optional labels/map.json translates an external label vocabulary to the
  // fixed class id table at ingestion: {"<src_id>": <dst_id>, ...}.
  std::array<std::uint8_t, 256> label_map{};
  for (int i = 0; i < 256; ++i) label_map[i] = static_cast<std::uint8_t>(i);
  fs::path map_path = fs::path(scene_dir) / "labels" / "map.json";
  if (fs::exists(map_path)) {
    std::ifstream in(map_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const std::exception& e) {
      throw InputError(std::string("malformed labels/map.json: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      int src = std::stoi(key);
      int dst = value.get<int>();
      if (src < 0 || src > 255 || dst < 0 || dst >= kNumSemanticClasses)
        throw InputError("labels/map.json entry out of range: " + key);
      label_map[src] = static_cast<std::uint8_t>(dst);
    }
  }

  for (CameraFrame& f : frames) {
    fs::path depth_path = fs::path(scene_dir) / "depth" / (std::to_string(f.id) + ".png");
    if (fs::exists(depth_path)) {
      f.depth = read_png16(depth_path.string());
      if (f.depth.width != f.width || f.depth.height != f.height)
        throw InputError("depth image size mismatch for frame " + std::to_string(f.id));
    }
    fs::path label_path = fs::path(scene_dir) / "labels" / (std::to_string(f.id) + ".png");
    if (fs::exists(label_path)) {
      LabelImage lbl = read_png8(label_path.string());
      if (lbl.width != f.width || lbl.height != f.height)
        throw InputError("label image size mismatch for frame " + std::to_string(f.id));
      for (auto& v : lbl.data) v = label_map[v];
      f.pixel_labels = std::move(lbl);
    }
  }
}

}  // namespace layoutkit::io
