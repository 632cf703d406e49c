#include "layoutkit/eval/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "layoutkit/log.hpp"

namespace layoutkit::eval {

using geom::Vec3;

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost, double* cost_out) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  // Classic potentials formulation, 1-based internals.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
        if (minv[j] < delta) { delta = minv[j]; j1 = j; }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j]) {
      row_to_col[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  if (cost_out) *cost_out = total;
  return row_to_col;
}

double entity_distance_rect(const LayoutEntity& a, const LayoutEntity& b) {
  if (a.sem_class != b.sem_class)
    throw std::invalid_argument("entity_distance_rect: class mismatch");
  if (!a.is_rect() || !b.is_rect())
    throw std::invalid_argument("entity_distance_rect: entities must have 4 corners");
  // Rectangles admit exactly 8 ring-preserving correspondences: 4 rotations
  // times 2 winding directions.
  double best = std::numeric_limits<double>::infinity();
  for (int flip = 0; flip < 2; ++flip) {
    for (int shift = 0; shift < 4; ++shift) {
      double worst = 0.0;
      for (int i = 0; i < 4; ++i) {
        int j = flip ? (shift - i + 8) % 4 : (shift + i) % 4;
        worst = std::max(worst, geom::norm(a.corners[i] - b.corners[j]));
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

double entity_distance_poly(const LayoutEntity& a, const LayoutEntity& b) {
  geom::Plane pa = geom::fit_plane(a.corners);
  geom::Plane pb = geom::fit_plane(b.corners);
  geom::PolygonView va{a.corners, pa};
  geom::PolygonView vb{b.corners, pb};
  return geom::polygon_hausdorff(va, vb);
}

double entity_distance(const LayoutEntity& a, const LayoutEntity& b) {
  switch (a.sem_class) {
    case io::SemanticClass::Door:
    case io::SemanticClass::Window:
      return entity_distance_rect(a, b);
    default:
      return entity_distance_poly(a, b);
  }
}

double match_and_f1(const std::vector<LayoutEntity>& pred, const std::vector<LayoutEntity>& gt,
                    double tau, std::vector<ClassF1>* per_class) {
  std::set<int> class_set;
  for (const LayoutEntity& e : pred) class_set.insert(static_cast<int>(e.sem_class));
  for (const LayoutEntity& e : gt) class_set.insert(static_cast<int>(e.sem_class));

  if (per_class) per_class->clear();
  double f1_sum = 0.0;
  int f1_count = 0;
  for (int cls : class_set) {
    std::vector<const LayoutEntity*> ps, gs;
    for (const LayoutEntity& e : pred)
      if (static_cast<int>(e.sem_class) == cls) ps.push_back(&e);
    for (const LayoutEntity& e : gt)
      if (static_cast<int>(e.sem_class) == cls) gs.push_back(&e);

    ClassF1 rec;
    rec.sem_class = static_cast<io::SemanticClass>(cls);
    if (ps.empty() && gs.empty()) {
      rec.f1 = 1.0;
    } else if (ps.empty() || gs.empty()) {
      rec.f1 = 0.0;
      rec.fp = static_cast<int>(ps.size());
      rec.fn = static_cast<int>(gs.size());
    } else {
      // Square cost matrix; disallowed pairs get a cost big enough that
      // minimizing total cost maximizes the number of valid matches first.
      const int n = static_cast<int>(std::max(ps.size(), gs.size()));
      const double big = (tau + 1.0) * (n + 1) * 8.0;
      std::vector<std::vector<double>> cost(n, std::vector<double>(n, big));
      for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < gs.size(); ++j) {
          double d;
          try {
            d = entity_distance(*ps[i], *gs[j]);
          } catch (const std::exception&) {
            continue;
          }
          if (d <= tau) cost[i][j] = d;
        }
      }
      auto assign = hungarian(cost);
      int tp = 0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        int j = assign[i];
        if (j >= 0 && j < static_cast<int>(gs.size()) && cost[i][j] < big) ++tp;
      }
      rec.tp = tp;
      rec.fp = static_cast<int>(ps.size()) - tp;
      rec.fn = static_cast<int>(gs.size()) - tp;
      rec.f1 = (2.0 * tp + rec.fp + rec.fn) > 0
                   ? 2.0 * tp / (2.0 * tp + rec.fp + rec.fn)
                   : 1.0;
    }
    if (per_class) per_class->push_back(rec);
    f1_sum += rec.f1;
    ++f1_count;
  }
  return f1_count > 0 ? f1_sum / f1_count : 1.0;
}

std::vector<LayoutEntity> entities_from_scene_graph(const io::SceneGraph& graph) {
  std::vector<LayoutEntity> out;
  auto add = [&](io::SemanticClass cls, const std::vector<Vec3>& ring) {
    if (ring.size() < 3) return;
    LayoutEntity e;
    e.sem_class = cls;
    e.corners = ring;
    out.push_back(std::move(e));
  };
  for (const io::SceneRoom& r : graph.rooms) {
    add(io::SemanticClass::Floor, r.floor);
    for (const auto& w : r.walls) add(io::SemanticClass::Wall, w);
    for (const auto& c : r.ceilings) add(io::SemanticClass::Ceiling, c);
    for (const auto& w : r.windows)
      add(io::SemanticClass::Window, {w[0], w[1], w[2], w[3]});
  }
  for (const io::SceneEdge& e : graph.edges) {
    if (e.kind == io::EdgeKind::Door) add(io::SemanticClass::Door, e.geometry);
    else if (e.kind == io::EdgeKind::Stairs) add(io::SemanticClass::Stairs, e.geometry);
  }
  return out;
}

std::vector<LayoutEntity> load_entities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open entity list: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw InputError(std::string("malformed entity JSON: ") + e.what());
  }
  std::vector<LayoutEntity> out;
  if (doc.is_object() && doc.contains("rooms")) {
    // scene-graph schema
    in.close();
    return entities_from_scene_graph(io::load_scene_graph(path));
  }
  for (const auto& rec : doc) {
    LayoutEntity e;
    e.sem_class = static_cast<io::SemanticClass>(rec.at("class").get<int>());
    for (const auto& c : rec.at("corners"))
      e.corners.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
    out.push_back(std::move(e));
  }
  return out;
}

EvalReport evaluate_layout(const std::vector<LayoutEntity>& pred,
                           const std::vector<LayoutEntity>& gt,
                           const std::vector<double>& thresholds) {
  EvalReport report;
  report.thresholds = thresholds;

  std::set<int> class_set;
  for (const LayoutEntity& e : pred) class_set.insert(static_cast<int>(e.sem_class));
  for (const LayoutEntity& e : gt) class_set.insert(static_cast<int>(e.sem_class));
  for (int cls : class_set) report.classes.push_back(static_cast<io::SemanticClass>(cls));

  report.f1_table.assign(report.classes.size(), std::vector<double>(thresholds.size(), 0.0));
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    std::vector<ClassF1> per_class;
    match_and_f1(pred, gt, thresholds[ti], &per_class);
    for (const ClassF1& rec : per_class) {
      for (std::size_t ci = 0; ci < report.classes.size(); ++ci) {
        if (report.classes[ci] == rec.sem_class) report.f1_table[ci][ti] = rec.f1;
      }
    }
  }
  report.avg_f1.assign(report.classes.size(), 0.0);
  for (std::size_t ci = 0; ci < report.classes.size(); ++ci) {
    double acc = 0.0;
    for (double f : report.f1_table[ci]) acc += f;
    report.avg_f1[ci] = thresholds.empty() ? 0.0 : acc / thresholds.size();
  }
  return report;
}

void write_eval_report(const EvalReport& report, const std::string& json_path) {
  nlohmann::ordered_json doc;
  doc["thresholds"] = report.thresholds;
  auto& classes = doc["classes"] = nlohmann::ordered_json::array();
  for (std::size_t ci = 0; ci < report.classes.size(); ++ci) {
    nlohmann::ordered_json rec;
    rec["class"] = io::semantic_class_name(report.classes[ci]);
    rec["f1_at"] = report.f1_table[ci];
    rec["avg_f1"] = report.avg_f1[ci];
    classes.push_back(rec);
  }
  if (report.delta_5 >= 0) doc["delta_5"] = report.delta_5;
  if (report.delta_10 >= 0) doc["delta_10"] = report.delta_10;
  doc["vertex_count"] = report.vertex_count;
  std::ofstream out(json_path);
  if (!out) throw InputError("cannot write eval report: " + json_path);
  out << doc.dump(2) << "\n";
}

std::string format_eval_table(const EvalReport& report) {
  std::ostringstream os;
  char buf[160];
  os << "class            ";
  for (double t : report.thresholds) {
    std::snprintf(buf, sizeof(buf), "F1@%-5.2f ", t);
    os << buf;
  }
  os << "AvgF1\n";
  for (std::size_t ci = 0; ci < report.classes.size(); ++ci) {
    std::snprintf(buf, sizeof(buf), "%-16s ", io::semantic_class_name(report.classes[ci]));
    os << buf;
    for (double f : report.f1_table[ci]) {
      std::snprintf(buf, sizeof(buf), "%-8.3f ", f);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.3f\n", report.avg_f1[ci]);
    os << buf;
  }
  if (report.delta_5 >= 0) {
    std::snprintf(buf, sizeof(buf), "delta_5 %.1f  delta_10 %.1f  ", report.delta_5,
                  report.delta_10);
    os << buf;
  }
  os << "#vertices " << report.vertex_count << "\n";
  return os.str();
}

}  // namespace layoutkit::eval
