#include "layoutkit/io/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "layoutkit/log.hpp"

namespace layoutkit::io {

using geom::Vec3;

const char* semantic_class_name(SemanticClass c) {
  switch (c) {
    case SemanticClass::Unknown: return "unknown";
    case SemanticClass::Wall: return "wall";
    case SemanticClass::Floor: return "floor";
    case SemanticClass::Ceiling: return "ceiling";
    case SemanticClass::Door: return "door";
    case SemanticClass::Window: return "window";
    case SemanticClass::Stairs: return "stairs";
    case SemanticClass::Object: return "object";
    case SemanticClass::Inaccurate: return "inaccurate";
    case SemanticClass::LargeFurniture: return "large_furniture";
  }
  return "unknown";
}

Vec3 LabeledMesh::triangle_normal(std::size_t t) const {
  const auto& tri = triangles[t];
  Vec3 n = cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
  double len = norm(n);
  return len > 1e-300 ? n / len : Vec3{0, 0, 0};
}

double LabeledMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * norm(cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]));
}

Vec3 LabeledMesh::triangle_centroid(std::size_t t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

namespace {

struct PlyProperty {
  std::string name;
  int size = 0;      // bytes
  bool is_list = false;
  int count_size = 0;
  int item_size = 0;
  bool is_float = false;
  bool item_is_float = false;
};

int type_size(const std::string& t, bool& is_float) {
  is_float = false;
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32") return 4;
  if (t == "float" || t == "float32") { is_float = true; return 4; }
  if (t == "double" || t == "float64") { is_float = true; return 8; }
  throw InputError("unsupported PLY type: " + t);
}

double read_scalar(const char* p, int size, bool is_float) {
  if (is_float) {
    if (size == 4) { float v; std::memcpy(&v, p, 4); return v; }
    double v; std::memcpy(&v, p, 8); return v;
  }
  switch (size) {
    case 1: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case 2: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    default: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
  }
}

}  // namespace

LabeledMesh load_labeled_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mesh file: " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    throw InputError("not a PLY file: " + path);

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
  };
  std::vector<Element> elements;
  bool binary_le = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment") continue;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      binary_le = fmt == "binary_little_endian";
      if (!binary_le) throw InputError("PLY must be binary little-endian: " + path);
    } else if (tok == "element") {
      Element e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) throw InputError("PLY property before element");
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        std::string ct, it;
        ss >> ct >> it >> p.name;
        bool dummy;
        p.is_list = true;
        p.count_size = type_size(ct, dummy);
        p.item_size = type_size(it, p.item_is_float);
      } else {
        ss >> p.name;
        p.size = type_size(t, p.is_float);
      }
      elements.back().props.push_back(p);
    } else if (tok == "end_header") {
      break;
    }
  }

  LabeledMesh mesh;
  for (const Element& e : elements) {
    if (e.name == "vertex") {
      int off_x = -1, off_y = -1, off_z = -1, off_label = -1;
      int stride = 0;
      PlyProperty px, py, pz, plabel;
      for (const PlyProperty& p : e.props) {
        if (p.is_list) throw InputError("list property in vertex element");
        if (p.name == "x") { off_x = stride; px = p; }
        if (p.name == "y") { off_y = stride; py = p; }
        if (p.name == "z") { off_z = stride; pz = p; }
        if (p.name == "label") { off_label = stride; plabel = p; }
        stride += p.size;
      }
      if (off_x < 0 || off_y < 0 || off_z < 0)
        throw InputError("missing vertex position property in " + path);
      if (off_label < 0) throw InputError("missing vertex property label in " + path);

      std::vector<char> buf(stride);
      mesh.vertices.reserve(e.count);
      mesh.vertex_labels.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!in.read(buf.data(), stride)) throw InputError("truncated PLY vertex data");
        Vec3 v{read_scalar(buf.data() + off_x, px.size, px.is_float),
               read_scalar(buf.data() + off_y, py.size, py.is_float),
               read_scalar(buf.data() + off_z, pz.size, pz.is_float)};
        if (!geom::finite(v)) throw InputError("non-finite vertex in " + path);
        mesh.vertices.push_back(v);
        int lbl = static_cast<int>(read_scalar(buf.data() + off_label, plabel.size, false));
        if (lbl < 0 || lbl >= kNumSemanticClasses) lbl = 0;
        mesh.vertex_labels.push_back(static_cast<SemanticClass>(lbl));
      }
    } else if (e.name == "face") {
      if (e.props.size() != 1 || !e.props[0].is_list)
        throw InputError("face element must have a single vertex_indices list");
      const PlyProperty& p = e.props[0];
      std::vector<char> buf;
      for (std::size_t i = 0; i < e.count; ++i) {
        char cntbuf[8];
        if (!in.read(cntbuf, p.count_size)) throw InputError("truncated PLY face data");
        int cnt = static_cast<int>(read_scalar(cntbuf, p.count_size, false));
        buf.resize(static_cast<std::size_t>(cnt) * p.item_size);
        if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
          throw InputError("truncated PLY face data");
        std::vector<std::uint32_t> idx(cnt);
        for (int k = 0; k < cnt; ++k) {
          long long v = static_cast<long long>(
              read_scalar(buf.data() + static_cast<std::size_t>(k) * p.item_size, p.item_size,
                          false));
          if (v < 0 || v >= static_cast<long long>(mesh.vertices.size()))
            throw InputError("face index out of range in " + path);
          idx[k] = static_cast<std::uint32_t>(v);
        }
        for (int k = 1; k + 1 < cnt; ++k)
          mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
      }
    } else {
      // Skip unknown fixed-size elements.
      std::size_t stride = 0;
      for (const PlyProperty& pr : e.props) {
        if (pr.is_list) throw InputError("cannot skip list element " + e.name);
        stride += pr.size;
      }
      in.seekg(static_cast<std::streamoff>(stride * e.count), std::ios::cur);
    }
  }

  std::size_t dropped = cleanup_mesh(mesh);
  if (dropped > 0) LK_INFO("dropped %zu degenerate triangles from %s", dropped, path.c_str());
  return mesh;
}

std::size_t cleanup_mesh(LabeledMesh& mesh, double weld_tol) {
  // Weld near-duplicate vertices via a quantized grid.
  std::map<std::array<long long, 3>, std::uint32_t> grid;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  std::vector<Vec3> verts;
  std::vector<SemanticClass> labels;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    std::array<long long, 3> key{static_cast<long long>(std::llround(v.x / weld_tol)),
                                 static_cast<long long>(std::llround(v.y / weld_tol)),
                                 static_cast<long long>(std::llround(v.z / weld_tol))};
    auto it = grid.find(key);
    if (it != grid.end()) {
      remap[i] = it->second;
    } else {
      std::uint32_t id = static_cast<std::uint32_t>(verts.size());
      grid.emplace(key, id);
      remap[i] = id;
      verts.push_back(v);
      labels.push_back(mesh.vertex_labels.empty() ? SemanticClass::Unknown
                                                  : mesh.vertex_labels[i]);
    }
  }

  std::size_t dropped = 0;
  std::vector<std::array<std::uint32_t, 3>> tris;
  tris.reserve(mesh.triangles.size());
  for (auto tri : mesh.triangles) {
    for (auto& v : tri) v = remap[v];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) { ++dropped; continue; }
    Vec3 n = cross(verts[tri[1]] - verts[tri[0]], verts[tri[2]] - verts[tri[0]]);
    if (norm(n) < 1e-14) { ++dropped; continue; }
    tris.push_back(tri);
  }
  mesh.vertices = std::move(verts);
  mesh.vertex_labels = std::move(labels);
  mesh.triangles = std::move(tris);
  return dropped;
}

void write_labeled_mesh(const LabeledMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\nproperty uchar label\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    float xyz[3] = {static_cast<float>(mesh.vertices[i].x),
                    static_cast<float>(mesh.vertices[i].y),
                    static_cast<float>(mesh.vertices[i].z)};
    std::uint8_t lbl = static_cast<std::uint8_t>(
        i < mesh.vertex_labels.size() ? mesh.vertex_labels[i] : SemanticClass::Unknown);
    out.write(reinterpret_cast<const char*>(xyz), 12);
    out.write(reinterpret_cast<const char*>(&lbl), 1);
  }
  for (const auto& tri : mesh.triangles) {
    std::uint8_t cnt = 3;
    std::int32_t idx[3] = {static_cast<std::int32_t>(tri[0]), static_cast<std::int32_t>(tri[1]),
                           static_cast<std::int32_t>(tri[2])};
    out.write(reinterpret_cast<const char*>(&cnt), 1);
    out.write(reinterpret_cast<const char*>(idx), 12);
  }
  if (!out) throw InputError("write failed: " + path);
}

std::vector<std::vector<std::uint32_t>> vertex_adjacency(const LabeledMesh& mesh) {
  std::vector<std::vector<std::uint32_t>> adj(mesh.vertices.size());
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      adj[tri[k]].push_back(tri[(k + 1) % 3]);
      adj[tri[k]].push_back(tri[(k + 2) % 3]);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<std::array<std::int64_t, 3>> triangle_adjacency(const LabeledMesh& mesh) {
  std::unordered_map<std::uint64_t, std::int64_t> edge_owner;
  std::vector<std::array<std::int64_t, 3>> adj(mesh.triangles.size(), {-1, -1, -1});
  auto key = [](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      std::uint64_t e = key(tri[k], tri[(k + 1) % 3]);
      auto it = edge_owner.find(e);
      if (it == edge_owner.end()) {
        edge_owner.emplace(e, static_cast<std::int64_t>((t << 2) | k));
      } else {
        std::int64_t packed = it->second;
        std::size_t ot = static_cast<std::size_t>(packed) >> 2;
        int ok = static_cast<int>(packed & 3);
        adj[t][k] = static_cast<std::int64_t>(ot);
        adj[ot][ok] = static_cast<std::int64_t>(t);
      }
    }
  }
  return adj;
}

}  // namespace layoutkit::io
