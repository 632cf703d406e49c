#include <doctest.h>

#include <cmath>
#include <random>

#include "layoutkit/eval/depth.hpp"
#include "layoutkit/eval/metrics.hpp"
#include "layoutkit/log.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace layoutkit;
using namespace layoutkit::eval;
using geom::Vec3;

namespace {

LayoutEntity rect(io::SemanticClass cls, Vec3 o, Vec3 eu, Vec3 ev) {
  LayoutEntity e;
  e.sem_class = cls;
  e.corners = {o, o + eu, o + eu + ev, o + ev};
  return e;
}

std::vector<LayoutEntity> random_rects(std::mt19937_64& rng, int count, io::SemanticClass cls) {
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  std::vector<LayoutEntity> out;
  for (int i = 0; i < count; ++i) {
    Vec3 o{uni(rng), uni(rng), uni(rng)};
    out.push_back(rect(cls, o, {1.0 + 0.2 * uni(rng), 0, 0}, {0, 0, 1.0 + 0.2 * uni(rng)}));
  }
  return out;
}

}  // namespace

TEST_CASE("entity_distance_rect") {
  auto a = rect(io::SemanticClass::Door, {0, 0, 0}, {1, 0, 0}, {0, 0, 2});
  CHECK(entity_distance_rect(a, a) == doctest::Approx(0.0));

  auto b = a;
  for (auto& c : b.corners) c += Vec3{0.1, 0, 0};
  CHECK(entity_distance_rect(a, b) == doctest::Approx(0.1));

  // 90-degree rotated square of the same center: corner sets coincide
  auto sq = rect(io::SemanticClass::Window, {-1, 0, -1}, {2, 0, 0}, {0, 0, 2});
  LayoutEntity rot = sq;
  rot.corners = {sq.corners[1], sq.corners[2], sq.corners[3], sq.corners[0]};
  CHECK(entity_distance_rect(sq, rot) == doctest::Approx(0.0));

  // invariance to starting index and winding
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto e1 = rect(io::SemanticClass::Door, {uni(rng), uni(rng), uni(rng)}, {1.2, 0, 0},
                   {0, 0.9, 0});
    auto e2 = rect(io::SemanticClass::Door, {uni(rng), uni(rng), uni(rng)}, {1.0, 0.2, 0},
                   {0, 0, 1.1});
    double base = entity_distance_rect(e1, e2);
    for (int shift = 0; shift < 4; ++shift) {
      LayoutEntity shifted = e2;
      for (int k = 0; k < 4; ++k) shifted.corners[k] = e2.corners[(k + shift) % 4];
      CHECK(entity_distance_rect(e1, shifted) == doctest::Approx(base));
      LayoutEntity reversed = shifted;
      std::reverse(reversed.corners.begin(), reversed.corners.end());
      CHECK(entity_distance_rect(e1, reversed) == doctest::Approx(base));
    }
  }

  auto tri = a;
  tri.corners.pop_back();
  CHECK_THROWS_AS(entity_distance_rect(a, tri), std::invalid_argument);
  auto other_class = a;
  other_class.sem_class = io::SemanticClass::Window;
  CHECK_THROWS_AS(entity_distance_rect(a, other_class), std::invalid_argument);
}

TEST_CASE("match_and_f1 basics") {
  std::mt19937_64 rng(5);
  auto gt = random_rects(rng, 4, io::SemanticClass::Door);

  SUBCASE("pred equals gt") {
    for (double tau : {0.05, 0.2, 1.0}) CHECK(match_and_f1(gt, gt, tau) == doctest::Approx(1.0));
  }
  SUBCASE("empty pred vs nonempty gt") {
    CHECK(match_and_f1({}, gt, 0.5) == doctest::Approx(0.0));
  }
  SUBCASE("two preds for one gt within tau") {
    std::vector<LayoutEntity> gt1{gt[0]};
    auto near = gt[0];
    for (auto& c : near.corners) c += Vec3{0.05, 0, 0};
    std::vector<LayoutEntity> pred{gt[0], near};
    CHECK(match_and_f1(pred, gt1, 0.5) == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("symmetry under swapping pred and gt") {
    auto pred = random_rects(rng, 3, io::SemanticClass::Door);
    CHECK(match_and_f1(pred, gt, 0.7) == doctest::Approx(match_and_f1(gt, pred, 0.7)));
  }
}

TEST_CASE("match_and_f1 agrees with exhaustive matching") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_real_distribution<double> tau_pick(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto pred = random_rects(rng, count(rng), io::SemanticClass::Door);
    auto gt = random_rects(rng, count(rng), io::SemanticClass::Door);
    // mix a second class in
    auto pred2 = random_rects(rng, count(rng) / 2, io::SemanticClass::Window);
    auto gt2 = random_rects(rng, count(rng) / 2, io::SemanticClass::Window);
    pred.insert(pred.end(), pred2.begin(), pred2.end());
    gt.insert(gt.end(), gt2.begin(), gt2.end());
    double tau = tau_pick(rng);
    double fast = match_and_f1(pred, gt, tau);
    double slow = testsupport::brute_force_f1(pred, gt, tau);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("F1 is monotone in tau") {
  std::mt19937_64 rng(77);
  auto pred = random_rects(rng, 5, io::SemanticClass::Door);
  auto gt = random_rects(rng, 5, io::SemanticClass::Door);
  std::vector<double> taus{0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  double prev = -1.0;
  for (double tau : taus) {
    double f1 = match_and_f1(pred, gt, tau);
    CHECK(f1 >= prev - 1e-12);
    prev = f1;
  }
}

TEST_CASE("render_depth matches the ray-cast oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int scene_i = 0; scene_i < 10; ++scene_i) {
    // random boxes around the camera
    std::vector<Triangle> tris;
    for (int b = 0; b < 6; ++b) {
      Vec3 o{uni(rng) * 3, uni(rng) * 3, uni(rng) * 2};
      Vec3 eu{1.0 + uni(rng), 0, 0};
      Vec3 ev{0, 1.0 + uni(rng), uni(rng)};
      tris.push_back({o, o + eu, o + eu + ev});
      tris.push_back({o, o + eu + ev, o + ev});
    }
    auto frames = testsupport::camera_ring({0, 0, 0.5}, 2, 120, 90, 70.0);
    for (const auto& f : frames) {
      auto raster = render_depth(tris, f);
      auto cast = render_depth_raycast(tris, f);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < raster.size(); ++i) {
        bool rv = raster[i] > 0, cv = cast[i] > 0;
        if (!rv && !cv) { ++agree; continue; }
        if (rv && cv && std::abs(static_cast<double>(raster[i]) - cast[i]) <= 1e-4) ++agree;
      }
      CHECK(static_cast<double>(agree) / raster.size() >= 0.999);
    }
  }
}

TEST_CASE("render_depth frontal wall") {
  // camera at origin looking along +y at a wall 2 m ahead
  io::CameraFrame f;
  f.id = 0;
  f.width = 64;
  f.height = 48;
  f.fx = f.fy = 40;
  f.cx = 32;
  f.cy = 24;
  // camera axes as columns: right (1,0,0), down (0,0,-1), forward (0,1,0)
  f.world_from_camera.rotation_rows = {Vec3{1, 0, 0}, Vec3{0, 0, 1}, Vec3{0, -1, 0}};
  f.world_from_camera.translation = {0, 0, 0};

  std::vector<Triangle> wall = {{Vec3{-5, 2, -5}, Vec3{5, 2, -5}, Vec3{5, 2, 5}},
                                {Vec3{-5, 2, -5}, Vec3{5, 2, 5}, Vec3{-5, 2, 5}}};
  auto depth = render_depth(wall, f);
  // center pixel exactly 2.0
  CHECK(depth[24 * 64 + 32] == doctest::Approx(2.0).epsilon(1e-6));
  for (float d : depth) CHECK(d > 0);

  SUBCASE("empty layout renders all invalid") {
    auto empty = render_depth({}, f);
    for (float d : empty) CHECK(d <= 0);
  }
}

TEST_CASE("depth_delta") {
  DepthMap gt(100, 2.0f);
  SUBCASE("identical maps") { CHECK(depth_delta(gt, gt, 5.0) == doctest::Approx(100.0)); }
  SUBCASE("uniform 3 cm offset") {
    DepthMap pred(100, 2.03f);
    CHECK(depth_delta(pred, gt, 5.0) == doctest::Approx(100.0));
    CHECK(depth_delta(pred, gt, 10.0) == doctest::Approx(100.0));
    DepthMap pred7(100, 2.07f);
    CHECK(depth_delta(pred7, gt, 5.0) == doctest::Approx(0.0));
  }
  SUBCASE("half the pixels off by a meter") {
    DepthMap pred(100, 2.0f);
    for (int i = 0; i < 50; ++i) pred[i] = 3.0f;
    CHECK(depth_delta(pred, gt, 5.0) == doctest::Approx(50.0));
  }
  SUBCASE("monotone in tau") {
    std::mt19937_64 rng(9);
    DepthMap pred(100);
    std::uniform_real_distribution<double> uni(1.8, 2.2);
    for (auto& v : pred) v = static_cast<float>(uni(rng));
    double prev = -1;
    for (double tau : {1.0, 2.0, 5.0, 10.0, 50.0}) {
      double d = depth_delta(pred, gt, tau);
      CHECK(d >= prev);
      prev = d;
    }
  }
  SUBCASE("no overlap errors") {
    DepthMap invalid(100, -1.0f);
    CHECK_THROWS_AS(depth_delta(invalid, gt, 5.0), InputError);
  }
}

TEST_CASE("hungarian minimizes assignment cost") {
  std::vector<std::vector<double>> cost{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  double total;
  auto assign = hungarian(cost, &total);
  CHECK(total == doctest::Approx(5.0));  // 1 + 2 + 2
  CHECK(assign[0] == 1);
  CHECK(assign[1] == 0);
  CHECK(assign[2] == 2);
}
