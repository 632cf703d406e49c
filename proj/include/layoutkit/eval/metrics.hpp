#pragma once
#include <array>
#include <string>
#include <vector>

#include "layoutkit/geom/distance.hpp"
#include "layoutkit/geom/vec.hpp"
#include "layoutkit/io/scene_graph.hpp"
#include "layoutkit/io/semantic.hpp"

namespace layoutkit::eval {

// One evaluated layout element: a semantic class plus polygon geometry.
// Doors, windows and stairs-as-rectangles carry exactly 4 corners.
struct LayoutEntity {
  io::SemanticClass sem_class = io::SemanticClass::Unknown;
  std::vector<geom::Vec3> corners;

  bool is_rect() const { return corners.size() == 4; }
};

// Minimum-cost assignment on a square cost matrix (Jonker-style O(n^3)).
// Returns row -> column; total cost in cost_out when non-null.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost,
                           double* cost_out = nullptr);

// Bottleneck corner distance between two same-class rectangles, minimized
// over the 8 ring-preserving corner correspondences.
// Throws on class mismatch or non-rectangles.
double entity_distance_rect(const LayoutEntity& a, const LayoutEntity& b);

// Vertex-to-surface Hausdorff distance for arbitrary polygons.
double entity_distance_poly(const LayoutEntity& a, const LayoutEntity& b);

// Rectangle classes use corner distance, planar classes use the Hausdorff
// distance.
double entity_distance(const LayoutEntity& a, const LayoutEntity& b);

struct ClassF1 {
  io::SemanticClass sem_class;
  double f1 = 0.0;
  int tp = 0, fp = 0, fn = 0;
};

// One-to-one matching per class maximizing matches with distance <= tau
// (ties minimize total distance), then F1 = 2TP / (2TP + FP + FN).
// Classes empty on both sides score 1.
double match_and_f1(const std::vector<LayoutEntity>& pred, const std::vector<LayoutEntity>& gt,
                    double tau, std::vector<ClassF1>* per_class = nullptr);

struct EvalReport {
  std::vector<double> thresholds;  // T_avg
  // per class: f1[class][threshold_index]
  std::vector<io::SemanticClass> classes;
  std::vector<std::vector<double>> f1_table;
  std::vector<double> avg_f1;      // per class, mean over thresholds
  double delta_5 = -1.0;           // percent, -1 when no depth evaluated
  double delta_10 = -1.0;
  std::size_t vertex_count = 0;
};

std::vector<LayoutEntity> entities_from_scene_graph(const io::SceneGraph& graph);
// Flat entity list: [{class, corners:[[x,y,z],...]}, ...]
std::vector<LayoutEntity> load_entities(const std::string& path);

EvalReport evaluate_layout(const std::vector<LayoutEntity>& pred,
                           const std::vector<LayoutEntity>& gt,
                           const std::vector<double>& thresholds);

void write_eval_report(const EvalReport& report, const std::string& json_path);
std::string format_eval_table(const EvalReport& report);

}  // namespace layoutkit::eval
