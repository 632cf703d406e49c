#pragma once
#include <span>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/io/mesh.hpp"
#include "layoutkit/io/observation.hpp"

namespace layoutkit::fit {

struct HoleReport {
  int projected_triangles = 0;
  int grown_floors = 0;
  int extended_edges = 0;
  int kept_open_edges = 0;
};

// Projects every object-mesh triangle onto the nearest floor polygon whose
// centroid lies below it and recomputes each floor as the union of its
// footprint with the projected triangles. Floor areas never shrink.
HoleReport close_floor_holes(PrototypeSet& set, const io::LabeledMesh& objects);

// Extends wall edges whose outward in-plane normal points down (up) to the
// floor (ceiling) plane below (above) when the vertical band between them
// is crossed by fewer than tau_extend observation segments per cm^2.
HoleReport close_wall_holes(PrototypeSet& set,
                            std::span<const io::ObservationSegment> segments,
                            double tau_extend);

}  // namespace layoutkit::fit
