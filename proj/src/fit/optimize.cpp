#include "layoutkit/fit/optimize.hpp"

#include <cmath>

#include "layoutkit/fit/merge.hpp"
#include "layoutkit/log.hpp"

namespace layoutkit::fit {

using geom::Vec3;

namespace {

PrototypeSet apply_step(const PrototypeSet& set, const FitGradient& grad, double alpha) {
  PrototypeSet out = set;
  for (std::size_t v = 0; v < out.vertices.size(); ++v)
    out.vertices[v] -= grad.d_vertex[v] * alpha;
  for (std::size_t p = 0; p < out.polygons.size(); ++p) {
    geom::Plane& pl = out.polygons[p].plane;
    auto basis = pl.basis();  // same basis the gradient was computed in
    Vec3 n = pl.normal - (basis[0] * grad.d_plane[p][0] + basis[1] * grad.d_plane[p][1]) * alpha;
    double len = geom::norm(n);
    if (len > 1e-12) pl.normal = n / len;
    pl.offset -= grad.d_plane[p][2] * alpha;
  }
  project_all_vertices(out);
  return out;
}

double evaluate(const PrototypeSet& set, std::span<const Vec3> skeleton,
                std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                ExecMode mode, FitGradient* grad) {
  FitState state = FitState::build(set, grad != nullptr);
  if (grad) grad->resize(set);
  LossBreakdown terms = total_loss(state, skeleton, segments, cfg, grad, mode);
  return terms.weighted_total(cfg);
}

}  // namespace

bool descend_step(PrototypeSet& set, std::span<const Vec3> skeleton_points,
                  std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                  double& loss, ExecMode mode) {
  FitGradient grad;
  double cur = evaluate(set, skeleton_points, segments, cfg, mode, &grad);
  if (!std::isfinite(cur)) throw InvariantError("optimize: non-finite loss");
  loss = cur;

  double gn = grad.max_block_norm();
  if (gn < 1e-12) return false;

  double alpha = cfg.step_size / gn;
  for (int bt = 0; bt < 30; ++bt, alpha *= 0.5) {
    PrototypeSet candidate = apply_step(set, grad, alpha);
    // A self-intersecting ring counts as a loss increase.
    if (!all_rings_simple(candidate)) continue;
    double cand_loss = evaluate(candidate, skeleton_points, segments, cfg, mode, nullptr);
    if (!std::isfinite(cand_loss)) throw InvariantError("optimize: non-finite loss");
    if (cand_loss <= cur) {
      set = std::move(candidate);
      loss = cand_loss;
      return true;
    }
  }
  return false;
}

OptimizeReport optimize(PrototypeSet& set, std::span<const Vec3> skeleton_points,
                        std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                        ExecMode mode) {
  cfg.validate();
  OptimizeReport report;

  project_all_vertices(set);
  report.max_projection_residual = max_plane_residual(set);

  double loss = evaluate(set, skeleton_points, segments, cfg, mode, nullptr);
  if (!std::isfinite(loss)) throw InvariantError("optimize: non-finite initial loss");
  report.loss_history.push_back(loss);

  for (int iter = 1; iter <= cfg.n_iters; ++iter) {
    double before = loss;
    bool moved = descend_step(set, skeleton_points, segments, cfg, loss, mode);
    if (moved) {
      ++report.accepted_steps;
      if (loss > before + 1e-15) report.monotone_steps = false;
    } else {
      ++report.stalled_steps;
    }
    report.loss_history.push_back(loss);
    report.max_projection_residual =
        std::max(report.max_projection_residual, max_plane_residual(set));

    if (iter % cfg.merge_period == 0 && iter < cfg.n_iters) {
      merge_and_simplify(set, cfg.tau_merge, skeleton_points, mode);
      project_all_vertices(set);
      report.merge_iterations.push_back(iter);
      loss = evaluate(set, skeleton_points, segments, cfg, mode, nullptr);
      report.loss_history.push_back(loss);
      report.max_projection_residual =
          std::max(report.max_projection_residual, max_plane_residual(set));
    }
  }
  report.final_loss = loss;
  return report;
}

}  // namespace layoutkit::fit
