#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ewh/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

ewh::ExperimentConfig load_config(const std::string& path,
                                  const std::string& out_dir,
                                  std::uint64_t seed_override) {
  auto cfg = ewh::ExperimentConfig::from_json_file(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed_override != 0) cfg.master_seed = seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-responsive electric water heater lab: simulator, "
               "batch-RL agent and thermostat baseline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, modes_arg = "full,ae3,ae5,ae15",
                                    sizes_arg = "10,25,50,75";
  std::uint64_t seed_override = 0;
  int sweep_seeds = 10;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("-o,--out", out_dir, "output directory override");
    cmd->add_option("-s,--seed", seed_override, "master seed override");
  };

  auto* run_cmd = app.add_subcommand(
      "run", "paired learning-agent vs thermostat experiment");
  add_common(run_cmd);

  auto* baseline_cmd =
      app.add_subcommand("baseline", "thermostat-only run");
  add_common(baseline_cmd);

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "feature-representation / batch-size evaluation grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--modes", modes_arg,
                        "comma-separated feature modes (full, ae<p>)");
  sweep_cmd->add_option("--batch-sizes", sizes_arg,
                        "comma-separated batch sizes in days");
  sweep_cmd->add_option("--seeds", sweep_seeds, "simulation runs per cell");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto cfg = load_config(config_path, out_dir, seed_override);
      auto result = ewh::run_experiment(cfg);
      std::printf("thermostat total: %.4f EUR\n", result.total_cost_thermostat);
      std::printf("fqi total:        %.4f EUR\n", result.total_cost_fqi);
      std::printf("saving (window):  %.1f%%\n", 100.0 * result.saving_fraction);
      std::printf("results written to %s\n", cfg.output_dir.c_str());
    } else if (baseline_cmd->parsed()) {
      auto cfg = load_config(config_path, out_dir, seed_override);
      auto result = ewh::run_baseline(cfg);
      std::printf("thermostat total: %.4f EUR\n", result.total_cost_thermostat);
      std::printf("results written to %s\n", cfg.output_dir.c_str());
    } else if (sweep_cmd->parsed()) {
      auto cfg = load_config(config_path, out_dir, seed_override);
      std::string out_csv = cfg.output_dir + "/sweep.csv";
      auto sizes_str = split_list(sizes_arg);
      std::vector<int> sizes;
      for (const auto& s : sizes_str) sizes.push_back(std::stoi(s));
      auto cells = ewh::run_sweep(cfg, split_list(modes_arg), sizes,
                                  sweep_seeds, out_csv);
      for (const auto& c : cells)
        std::printf("%-6s batch=%-3d seeds=%d mean cost %.4f EUR\n",
                    c.mode.c_str(), c.batch_days, c.n_seeds, c.mean_cost);
      std::printf("sweep written to %s\n", out_csv.c_str());
    }
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
