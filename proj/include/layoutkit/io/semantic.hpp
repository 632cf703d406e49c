#pragma once
#include <cstdint>

namespace layoutkit::io {

// Fine semantic classes carried per vertex / per pixel. The id table is
// fixed; external label vocabularies must be mapped at ingestion.
enum class SemanticClass : std::uint8_t {
  Unknown = 0,
  Wall = 1,
  Floor = 2,
  Ceiling = 3,
  Door = 4,
  Window = 5,
  Stairs = 6,
  Object = 7,
  Inaccurate = 8,
  LargeFurniture = 9,
};
constexpr int kNumSemanticClasses = 10;

// Coarse processing categories. Doors count as objects here: they are
// re-detected geometrically later and must not punch holes in walls.
enum class CoarseCategory : std::uint8_t {
  Structural = 0,
  GeometricallyInaccurate = 1,
  Object = 2,
  Stairs = 3,
};

inline CoarseCategory coarse_category(SemanticClass c) {
  switch (c) {
    case SemanticClass::Wall:
    case SemanticClass::Floor:
    case SemanticClass::Ceiling:
    case SemanticClass::LargeFurniture:
      return CoarseCategory::Structural;
    case SemanticClass::Window:
    case SemanticClass::Inaccurate:
      return CoarseCategory::GeometricallyInaccurate;
    case SemanticClass::Stairs:
      return CoarseCategory::Stairs;
    case SemanticClass::Door:
    case SemanticClass::Object:
    case SemanticClass::Unknown:
    default:
      return CoarseCategory::Object;
  }
}

const char* semantic_class_name(SemanticClass c);

}  // namespace layoutkit::io
