#include "layoutkit/io/observation.hpp"

#include <random>

#include "layoutkit/log.hpp"

namespace layoutkit::io {

using geom::Vec3;

std::vector<ObservationSegment> build_observation_segments(
    const std::vector<CameraFrame>& frames, int stride, ExecMode mode) {
  if (stride < 1) stride = 1;

  // Per-frame slots keep the output order independent of scheduling.
  std::vector<std::vector<ObservationSegment>> per_frame(frames.size());
  indexed_for(mode, static_cast<std::int64_t>(frames.size()), [&](std::size_t fi) {
    const CameraFrame& f = frames[fi];
    std::vector<ObservationSegment>& out = per_frame[fi];
    Vec3 origin = f.center();
    for (int v = 0; v < f.height; v += stride) {
      for (int u = 0; u < f.width; u += stride) {
        double d = f.depth_at(u, v);
        if (d <= 0.0) continue;
        out.push_back({origin, f.unproject(u, v, d)});
      }
    }
  });

  std::vector<ObservationSegment> segments;
  for (auto& chunk : per_frame)
    segments.insert(segments.end(), chunk.begin(), chunk.end());
  return segments;
}

std::vector<LabeledPoint> backproject_labeled_pixels(const CameraFrame& frame, int m,
                                                     std::uint64_t seed) {
  if (!frame.pixel_labels.has_value())
    throw InputError("backproject_labeled_pixels: frame has no pixel labels");

  std::vector<std::pair<int, int>> valid;
  for (int v = 0; v < frame.height; ++v)
    for (int u = 0; u < frame.width; ++u)
      if (frame.depth_at(u, v) > 0.0) valid.emplace_back(u, v);

  const int n = static_cast<int>(valid.size());
  const int take = std::min(m, n);

  // Partial Fisher-Yates: deterministic sample without replacement.
  std::mt19937_64 rng(seed);
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(valid[i], valid[pick(rng)]);
  }

  std::vector<LabeledPoint> points;
  points.reserve(take);
  for (int i = 0; i < take; ++i) {
    auto [u, v] = valid[i];
    LabeledPoint p;
    p.position = frame.unproject(u, v, frame.depth_at(u, v));
    p.label = static_cast<SemanticClass>(frame.pixel_labels->at(u, v) % kNumSemanticClasses);
    p.source_frame = frame.id;
    points.push_back(p);
  }
  return points;
}

}  // namespace layoutkit::io
