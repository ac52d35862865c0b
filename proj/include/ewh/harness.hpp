#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewh/autoencoder.hpp"
#include "ewh/control.hpp"
#include "ewh/data_io.hpp"
#include "ewh/extra_trees.hpp"
#include "ewh/fqi.hpp"
#include "ewh/tank.hpp"

namespace ewh {

struct FeatureMode {
  bool full = true;
  int latent_dim = 0;  // used when !full

  static FeatureMode parse(const std::string& text);  // "full" or "ae<p>"
  std::string name() const;
};

struct PriceSource {
  std::string type = "imbalance";  // imbalance | dayahead | file
  std::string path;
  std::uint64_t seed = 0;  // 0 => derived from the master seed

  PriceSeries realize(int n_days, std::uint64_t fallback_seed) const;
};

struct DemandSource {
  std::string type = "generate";  // generate | file
  std::string path;
  DemandGenParams params;

  DemandSeries realize(int n_days, std::uint64_t fallback_seed) const;
};

struct ExperimentConfig {
  int n_days = 60;
  int n_sensors = 50;
  FeatureMode feature_mode;
  TankParams tank;
  BackupConfig backup;
  ExtraTreesParams regressor{.n_trees = 20, .k_splits = 0, .n_min = 5};
  ExplorationState exploration;
  AutoencoderHyper ae;
  PriceSource price_source;
  DemandSource demand_source;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::vector<int> trace_days;
  int summary_window_start = 1;  // first day counted in the saving figure
  double initial_temp = 55.0;

  void validate() const;
  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

struct RawTransition {
  ObservedState x;
  int u = 0;
  ObservedState x_next;
  double u_ph = 0.0;
};

struct PeriodResult {
  RawTransition raw;
  double cost = 0.0;
  double soc = 0.0;
  double u_ph = 0.0;
};

struct DayResult {
  int day = 0;
  std::string controller;
  double cost = 0.0;
  double energy_kwh = 0.0;
  double min_soc = 1.0;
  double tau = 0.0;
};

// Applies the backup-filtered action for one 15-minute period; advances the
// tank through 900/t_sim sub-steps with the quarter's draw flow.
PeriodResult run_control_period(TankState& tank, int day_of_week, int quarter,
                                int action, double price_eur_kwh,
                                double draw_liters,
                                const ExperimentConfig& cfg);

struct AgentState {
  std::vector<RawTransition> raw_batch;
  ExplorationState exploration;
  std::optional<AutoencoderModel> ae_model;
  QFunction q;
};

// Morning retrain (autoencoder + fitted Q-iteration with today's prices),
// 96 Boltzmann-controlled periods, evening batch append and tau decay.
DayResult run_agent_day(TankState& tank, AgentState& agent, int day_index,
                        const PriceVector& prices,
                        const std::vector<DrawEvent>& demand_day,
                        const ExperimentConfig& cfg, Rng& exploration_rng,
                        std::vector<std::vector<double>>* trace = nullptr);

// Thermostat baseline day; price-agnostic.
DayResult run_thermostat_day(TankState& tank, bool& heating, int day_index,
                             const PriceVector& prices,
                             const std::vector<DrawEvent>& demand_day,
                             const ExperimentConfig& cfg,
                             std::vector<std::vector<double>>* trace = nullptr);

struct ExperimentResult {
  std::vector<DayResult> days;  // both controllers
  double total_cost_fqi = 0.0;
  double total_cost_thermostat = 0.0;
  double saving_fraction = 0.0;  // over [summary_window_start, n_days]
};

// Full paired experiment; writes results.csv, summary.json and per-quarter
// traces under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Thermostat-only run; writes results.csv and summary.json.
ExperimentResult run_baseline(const ExperimentConfig& cfg);

struct SweepCell {
  std::string mode;
  int batch_days = 0;
  int n_seeds = 0;
  double mean_cost = 0.0;
};

// Fixed-batch evaluation grid: collect, train, score a greedy policy on a
// fixed evaluation day set; cells averaged over seeds.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<std::string>& modes,
                                 const std::vector<int>& batch_sizes,
                                 int n_seeds, const std::string& out_csv);

}  // namespace ewh
