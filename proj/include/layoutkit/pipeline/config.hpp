#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "layoutkit/fit/prototype.hpp"
#include "layoutkit/graph/levels.hpp"
#include "layoutkit/skel/skeleton.hpp"

namespace layoutkit::pipeline {

// Whole-pipeline configuration: key = value lines, '#' comments, unknown
// keys rejected. Command-line flags override file values.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int threads = 0;  // 0: machine parallelism

  skel::SuperpointConfig superpoints;
  int pixels_per_frame = 5000;  // M back-projected labeled pixels
  int segment_stride = 8;

  fit::FitConfig fit;
  graph::GraphConfig graph;

  std::vector<double> f1_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  std::vector<double> depth_taus_cm = {5.0, 10.0};

  void validate() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);
// Documented key listing for --help and the README.
std::string config_schema();

}  // namespace layoutkit::pipeline
