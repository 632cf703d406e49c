#pragma once
#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/skel/skeleton.hpp"

namespace layoutkit::fit {

// Seeds the prototype from structural superpoints: RANSAC plane split
// (inlier tolerance delta_sp), alpha-shape boundary per plane, RDP
// simplification. Superpoints too small to bound are skipped with a warning.
PrototypeSet init_polygons(const skel::SkeletonBundle& bundle, const FitConfig& cfg,
                           const skel::SuperpointConfig& sp_cfg = {});

}  // namespace layoutkit::fit
