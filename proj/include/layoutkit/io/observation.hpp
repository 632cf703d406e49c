#pragma once
#include <cstdint>
#include <vector>

#include "layoutkit/geom/vec.hpp"
#include "layoutkit/io/camera.hpp"
#include "layoutkit/io/semantic.hpp"
#include "layoutkit/parallel.hpp"

namespace layoutkit::io {

// Camera-center-to-backprojected-depth line segment: observed empty space.
struct ObservationSegment {
  geom::Vec3 origin;    // camera center
  geom::Vec3 endpoint;  // back-projected depth point
};

struct LabeledPoint {
  geom::Vec3 position;
  SemanticClass label = SemanticClass::Unknown;
  int source_frame = -1;
};

// One segment per valid-depth pixel on a stride x stride grid, all frames.
std::vector<ObservationSegment> build_observation_segments(
    const std::vector<CameraFrame>& frames, int stride,
    ExecMode mode = ExecMode::Parallel);

// Back-projects m uniformly sampled valid-depth labeled pixels (without
// replacement; capped at the valid pixel count). Deterministic under seed.
std::vector<LabeledPoint> backproject_labeled_pixels(const CameraFrame& frame, int m,
                                                     std::uint64_t seed);

}  // namespace layoutkit::io
