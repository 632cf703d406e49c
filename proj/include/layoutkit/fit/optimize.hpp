#pragma once
#include <span>
#include <vector>

#include "layoutkit/fit/losses.hpp"
#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/io/observation.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::fit {

struct OptimizeReport {
  std::vector<double> loss_history;  // loss after each iteration (accepted value)
  std::vector<int> merge_iterations;
  double final_loss = 0.0;
  double max_projection_residual = 0.0;  // max over all iterations, post-projection
  bool monotone_steps = true;            // non-increasing across accepted steps
  int accepted_steps = 0;
  int stalled_steps = 0;
};

// Gradient descent over vertex positions and plane parameters with
// backtracking halving and hard coplanarity projection after every step.
// Every merge_period iterations the set is simplified in place.
// Throws InvariantError on a non-finite loss.
OptimizeReport optimize(PrototypeSet& set, std::span<const geom::Vec3> skeleton_points,
                        std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                        ExecMode mode = ExecMode::Parallel);

// One backtracking descent step; returns true when a step was accepted.
// Exposed for tests; `loss` holds the current (entering) loss and is updated.
bool descend_step(PrototypeSet& set, std::span<const geom::Vec3> skeleton_points,
                  std::span<const io::ObservationSegment> segments, const FitConfig& cfg,
                  double& loss, ExecMode mode);

}  // namespace layoutkit::fit
