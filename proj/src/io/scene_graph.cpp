#include "layoutkit/io/scene_graph.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "layoutkit/log.hpp"

namespace layoutkit::io {

using geom::Vec3;

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Door: return "door";
    case EdgeKind::Opening: return "opening";
    case EdgeKind::Stairs: return "stairs";
  }
  return "opening";
}

void SceneGraph::validate() const {
  std::set<int> room_ids;
  for (const SceneRoom& r : rooms) {
    if (!room_ids.insert(r.id).second)
      throw InvariantError("duplicate room id " + std::to_string(r.id));
    bool level_ok = false;
    for (const SceneLevel& l : levels) level_ok |= l.id == r.level_id;
    if (!level_ok)
      throw InvariantError("room " + std::to_string(r.id) + " references missing level " +
                           std::to_string(r.level_id));
    if (r.floor.size() < 3)
      throw InvariantError("room " + std::to_string(r.id) + " has a degenerate floor ring");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const SceneEdge& e = edges[i];
    if (!room_ids.count(e.room_a) || !room_ids.count(e.room_b))
      throw InvariantError("edge " + std::to_string(i) + " references a missing room");
    if (e.kind == EdgeKind::Door && !(e.width_m < 1.5))
      throw InvariantError("door edge " + std::to_string(i) + " has width >= 1.5 m");
  }
}

std::size_t SceneGraph::distinct_vertex_count() const {
  std::set<std::array<long long, 3>> seen;
  auto add = [&](const Vec3& v) {
    seen.insert({static_cast<long long>(std::llround(v.x * 1e6)),
                 static_cast<long long>(std::llround(v.y * 1e6)),
                 static_cast<long long>(std::llround(v.z * 1e6))});
  };
  for (const SceneRoom& r : rooms) {
    for (const Vec3& v : r.floor) add(v);
    for (const auto& w : r.walls)
      for (const Vec3& v : w) add(v);
    for (const auto& c : r.ceilings)
      for (const Vec3& v : c) add(v);
    for (const auto& w : r.windows)
      for (const Vec3& v : w) add(v);
  }
  for (const SceneEdge& e : edges)
    for (const Vec3& v : e.geometry) add(v);
  return seen.size();
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  // -0.000000 and 0.000000 must serialize identically
  if (std::abs(v) < 5e-7) v = 0.0;
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

void append_point(std::string& out, const Vec3& p) {
  out += '[';
  append_number(out, p.x);
  out += ',';
  append_number(out, p.y);
  out += ',';
  append_number(out, p.z);
  out += ']';
}

template <typename Seq>
void append_ring(std::string& out, const Seq& pts) {
  out += '[';
  bool first = true;
  for (const Vec3& p : pts) {
    if (!first) out += ',';
    first = false;
    append_point(out, p);
  }
  out += ']';
}

template <typename SeqOfSeq>
void append_rings(std::string& out, const SeqOfSeq& rings) {
  out += '[';
  bool first = true;
  for (const auto& r : rings) {
    if (!first) out += ',';
    first = false;
    append_ring(out, r);
  }
  out += ']';
}

Vec3 parse_point(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("point must be [x,y,z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Vec3> parse_ring(const nlohmann::json& j) {
  std::vector<Vec3> out;
  for (const auto& p : j) out.push_back(parse_point(p));
  return out;
}

}  // namespace

void write_scene_graph(const SceneGraph& graph, const std::string& path) {
  std::string out;
  out.reserve(1 << 16);
  out += "{\n  \"levels\": [";
  for (std::size_t i = 0; i < graph.levels.size(); ++i) {
    if (i) out += ',';
    out += "\n    {\"id\": " + std::to_string(graph.levels[i].id) + ", \"height_m\": ";
    append_number(out, graph.levels[i].height_m);
    out += '}';
  }
  if (!graph.levels.empty()) out += "\n  ";
  out += "],\n  \"rooms\": [";
  for (std::size_t i = 0; i < graph.rooms.size(); ++i) {
    const SceneRoom& r = graph.rooms[i];
    if (i) out += ',';
    out += "\n    {\"id\": " + std::to_string(r.id) +
           ", \"level_id\": " + std::to_string(r.level_id) + ", \"floor\": ";
    append_ring(out, r.floor);
    out += ", \"walls\": ";
    append_rings(out, r.walls);
    out += ", \"ceilings\": ";
    append_rings(out, r.ceilings);
    out += ", \"windows\": ";
    append_rings(out, r.windows);
    out += '}';
  }
  if (!graph.rooms.empty()) out += "\n  ";
  out += "],\n  \"edges\": [";
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const SceneEdge& e = graph.edges[i];
    if (i) out += ',';
    out += "\n    {\"type\": \"";
    out += edge_kind_name(e.kind);
    out += "\", \"room_a\": " + std::to_string(e.room_a) +
           ", \"room_b\": " + std::to_string(e.room_b) + ", \"geometry\": ";
    append_ring(out, e.geometry);
    out += ", \"width_m\": ";
    append_number(out, e.width_m);
    out += '}';
  }
  if (!graph.edges.empty()) out += "\n  ";
  out += "]\n}\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write scene graph: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("scene graph write failed: " + path);
}

SceneGraph load_scene_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene graph: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw InputError(std::string("malformed scene graph JSON: ") + e.what());
  }

  SceneGraph g;
  for (const auto& l : doc.value("levels", nlohmann::json::array())) {
    g.levels.push_back({l.at("id").get<int>(), l.at("height_m").get<double>()});
  }
  for (const auto& r : doc.value("rooms", nlohmann::json::array())) {
    SceneRoom room;
    room.id = r.at("id").get<int>();
    room.level_id = r.at("level_id").get<int>();
    room.floor = parse_ring(r.at("floor"));
    for (const auto& w : r.at("walls")) room.walls.push_back(parse_ring(w));
    for (const auto& c : r.at("ceilings")) room.ceilings.push_back(parse_ring(c));
    for (const auto& w : r.at("windows")) {
      auto ring = parse_ring(w);
      if (ring.size() != 4) throw InputError("window must have 4 corners");
      room.windows.push_back({ring[0], ring[1], ring[2], ring[3]});
    }
    g.rooms.push_back(std::move(room));
  }
  for (const auto& e : doc.value("edges", nlohmann::json::array())) {
    SceneEdge edge;
    std::string type = e.at("type").get<std::string>();
    if (type == "door") edge.kind = EdgeKind::Door;
    else if (type == "stairs") edge.kind = EdgeKind::Stairs;
    else if (type == "opening") edge.kind = EdgeKind::Opening;
    else throw InputError("unknown edge type: " + type);
    edge.room_a = e.at("room_a").get<int>();
    edge.room_b = e.at("room_b").get<int>();
    edge.geometry = parse_ring(e.at("geometry"));
    edge.width_m = e.at("width_m").get<double>();
    g.edges.push_back(std::move(edge));
  }
  return g;
}

}  // namespace layoutkit::io
