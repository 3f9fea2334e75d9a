#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lanetopo/commands.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/io.hpp"

namespace fs = std::filesystem;
using namespace lanetopo;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  ToolConfig load() const {
    std::optional<fs::path> path;
    if (!config_path.empty()) path = config_path;
    return load_config(path, overrides);
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "JSON config file");
  cmd->add_option("--set", common.overrides, "Override a config key, e.g. --set tau=0.4")
      ->take_all();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane topology inference and OpenLane-style evaluation"};
  app.require_subcommand(1);

  Common common;

  std::string gt_path, pred_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("--gt", gt_path, "Ground-truth frames")->required();
  eval_cmd->add_option("--pred", pred_path, "Predicted frames")->required();
  add_common(eval_cmd, common);

  std::string out_gt, out_pred;
  auto* gen_cmd = app.add_subcommand("generate", "Write synthetic ground truth and predictions");
  gen_cmd->add_option("--out-gt", out_gt, "Ground-truth output")->required();
  gen_cmd->add_option("--out-pred", out_pred, "Perturbed prediction output")->required();
  add_common(gen_cmd, common);

  std::string frames_path, lane_mlp_path, te_mlp_path, out_path;
  auto* infer_cmd = app.add_subcommand("infer", "Replace topology with MLP + gap-rule inference");
  infer_cmd->add_option("--frames", frames_path, "Frames carrying lane/TE features")->required();
  infer_cmd->add_option("--lane-mlp", lane_mlp_path, "Lane-lane MLP parameters")->required();
  infer_cmd->add_option("--te-mlp", te_mlp_path, "Lane-TE MLP parameters")->required();
  infer_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");
  add_common(infer_cmd, common);

  std::string in_path, mode;
  auto* convert_cmd = app.add_subcommand("convert", "Rewrite lanes as 11 equally spaced points");
  convert_cmd->add_option("--in", in_path, "Input frames")->required();
  convert_cmd->add_option("--mode", mode, "bezier5_to_points11 | resample11")->required();
  convert_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");

  std::string kind;
  std::size_t dim = 0;
  bool zero = false;
  auto* mlp_cmd = app.add_subcommand("init-mlp", "Write seeded (or all-zero) MLP parameters");
  mlp_cmd->add_option("--kind", kind, "lane_lane | lane_te")->required();
  mlp_cmd->add_option("--dim", dim, "Feature width of the LC/TE queries")->required();
  mlp_cmd->add_flag("--zero", zero, "All weights and biases zero");
  mlp_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");
  add_common(mlp_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*eval_cmd) {
      const ToolConfig config = common.load();
      std::cout << commands::evaluate(gt_path, pred_path, config, commands::threads_from_env());
    } else if (*gen_cmd) {
      commands::generate(common.load(), out_gt, out_pred);
    } else if (*infer_cmd) {
      const ToolConfig config = common.load();
      auto frames = io::load_frames(frames_path);
      const auto lane_mlp = io::load_mlp(lane_mlp_path);
      const auto te_mlp = io::load_mlp(te_mlp_path);
      const auto out = commands::infer(std::move(frames), lane_mlp, te_mlp, config);
      emit(out_path, io::frames_to_json(out).dump(1) + "\n");
    } else if (*convert_cmd) {
      const auto frames = commands::convert(in_path, commands::convert_mode_from_string(mode));
      emit(out_path, io::frames_to_json(frames).dump(1) + "\n");
    } else if (*mlp_cmd) {
      commands::MlpKind k;
      if (kind == "lane_lane") {
        k = commands::MlpKind::lane_lane;
      } else if (kind == "lane_te") {
        k = commands::MlpKind::lane_te;
      } else {
        throw ConfigError("--kind must be lane_lane or lane_te");
      }
      const auto params = commands::init_mlp(common.load(), k, dim, zero);
      emit(out_path, io::mlp_to_json(params).dump(1) + "\n");
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return commands::kExitIo;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return commands::kExitSchema;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return commands::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
