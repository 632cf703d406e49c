#pragma once
#include <optional>
#include <string>

#include "layoutkit/pipeline/config.hpp"

namespace layoutkit::pipeline {

enum class Stage { Skeleton, Fit, Graph, Eval, RenderDepth, All };

struct RunOptions {
  std::string scene_dir;
  std::string out_dir;
  PipelineConfig config;
  Stage stage = Stage::All;
  std::string gt_path;  // scene-graph JSON or flat entity list, optional
};

// Runs the requested stages; writes artifacts into out_dir. Returns 0 on
// success, 2 on missing/invalid inputs, 3 on an invariant violation.
int run_pipeline(const RunOptions& options);

// Individual stage entry points (used by subcommands; stage isolation:
// each consumes only artifacts of earlier stages).
void run_skeleton_stage(const RunOptions& options);
void run_fit_stage(const RunOptions& options);
void run_graph_stage(const RunOptions& options);
void run_eval_stage(const RunOptions& options);
void run_render_depth_stage(const RunOptions& options);

}  // namespace layoutkit::pipeline
