// Command-line front end: skeleton / fit / graph / eval / render-depth
// subcommands plus `pipeline` running every stage in order.
#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "layoutkit/log.hpp"
#include "layoutkit/pipeline/run.hpp"

namespace {

using layoutkit::pipeline::PipelineConfig;
using layoutkit::pipeline::RunOptions;
using layoutkit::pipeline::Stage;

struct CommonArgs {
  std::string scene_dir;
  std::string out_dir;
  std::string config_path;
  std::string gt_path;
  std::string stage_override;
  int threads = -1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_gt) {
  cmd->add_option("scene", args.scene_dir, "scene directory (mesh.ply, cameras.json, depth/, labels/)")
      ->required();
  cmd->add_option("out", args.out_dir, "output directory")->required();
  cmd->add_option("--config", args.config_path, "config file (key = value lines)");
  cmd->add_option("--threads", args.threads, "worker threads (default: machine parallelism)");
  cmd->add_option("--seed", args.seed, "rng seed override");
  if (with_gt) cmd->add_option("--gt", args.gt_path, "ground-truth scene graph or entity list");
}

int run_stage(const CommonArgs& args, Stage stage) {
  RunOptions opt;
  opt.scene_dir = args.scene_dir;
  opt.out_dir = args.out_dir;
  opt.stage = stage;
  opt.gt_path = args.gt_path;
  try {
    if (!args.config_path.empty())
      opt.config = layoutkit::pipeline::load_config(args.config_path);
    if (args.threads >= 0) opt.config.threads = args.threads;
    if (args.seed >= 0) opt.config.seed = static_cast<std::uint64_t>(args.seed);
    opt.config.validate();
  } catch (const layoutkit::InputError& e) {
    LK_ERROR("%s", e.what());
    return 2;
  }
  return layoutkit::pipeline::run_pipeline(opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layoutkit: polygonal building layout estimation from labeled meshes"};
  app.require_subcommand(1);
  app.footer("config keys:\n" + layoutkit::pipeline::config_schema());

  CommonArgs args;

  CLI::App* skeleton = app.add_subcommand("skeleton", "label transfer and structural split");
  add_common(skeleton, args, false);
  CLI::App* fit = app.add_subcommand("fit", "fit the layout prototype to the skeleton");
  add_common(fit, args, false);
  CLI::App* graph = app.add_subcommand("graph", "rooms, doors, stairs, windows, scene graph");
  add_common(graph, args, false);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a scene graph against ground truth");
  add_common(eval, args, true);
  CLI::App* render = app.add_subcommand("render-depth", "render layout depth maps per frame");
  add_common(render, args, false);
  CLI::App* pipeline = app.add_subcommand("pipeline", "run all stages");
  add_common(pipeline, args, true);
  std::string stage_only;
  pipeline->add_option("--stage", stage_only, "run a single stage (skeleton|fit|graph|eval)");

  CLI11_PARSE(app, argc, argv);

  Stage stage = Stage::All;
  if (skeleton->parsed()) stage = Stage::Skeleton;
  else if (fit->parsed()) stage = Stage::Fit;
  else if (graph->parsed()) stage = Stage::Graph;
  else if (eval->parsed()) stage = Stage::Eval;
  else if (render->parsed()) stage = Stage::RenderDepth;
  else if (pipeline->parsed() && !stage_only.empty()) {
    if (stage_only == "skeleton") stage = Stage::Skeleton;
    else if (stage_only == "fit") stage = Stage::Fit;
    else if (stage_only == "graph") stage = Stage::Graph;
    else if (stage_only == "eval") stage = Stage::Eval;
    else if (stage_only == "render-depth") stage = Stage::RenderDepth;
    else {
      LK_ERROR("unknown --stage: %s", stage_only.c_str());
      return 2;
    }
  }
  return run_stage(args, stage);
}
