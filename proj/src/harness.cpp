#include "ewh/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ewh {

namespace {

// master-seed derivation streams
constexpr std::uint64_t kStreamDemand = 1;
constexpr std::uint64_t kStreamExploration = 2;
constexpr std::uint64_t kStreamAutoencoder = 3;
constexpr std::uint64_t kStreamRegressor = 4;
constexpr std::uint64_t kStreamPrices = 5;
constexpr std::uint64_t kStreamEvalDemand = 6;
constexpr std::uint64_t kStreamSweep = 7;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int day_of_week(int day_index) { return (day_index - 1) % 7 + 1; }

}  // namespace

FeatureMode FeatureMode::parse(const std::string& text) {
  FeatureMode m;
  if (text == "full") {
    m.full = true;
    return m;
  }
  if (text.rfind("ae", 0) == 0) {
    int p = std::atoi(text.c_str() + 2);
    if (p >= 1) {
      m.full = false;
      m.latent_dim = p;
      return m;
    }
  }
  throw std::invalid_argument("unknown feature mode '" + text +
                              "' (use 'full' or 'ae<p>')");
}

std::string FeatureMode::name() const {
  return full ? "full" : "ae" + std::to_string(latent_dim);
}

PriceSeries PriceSource::realize(int n_days, std::uint64_t fallback_seed) const {
  std::uint64_t s = seed != 0 ? seed : fallback_seed;
  if (type == "imbalance") return generate_imbalance_prices(n_days, s);
  if (type == "dayahead") return generate_dayahead_prices(n_days, s);
  if (type == "file") {
    PriceSeries series = load_prices(path);
    if (static_cast<int>(series.days.size()) < n_days)
      throw std::invalid_argument("price file has " +
                                  std::to_string(series.days.size()) +
                                  " days, experiment needs " +
                                  std::to_string(n_days));
    series.days.resize(n_days);
    return series;
  }
  throw std::invalid_argument("unknown price source type '" + type + "'");
}

DemandSeries DemandSource::realize(int n_days, std::uint64_t fallback_seed) const {
  if (type == "generate") {
    DemandGenParams p = params;
    if (p.seed == 0) p.seed = fallback_seed;
    return generate_demand(p, n_days);
  }
  if (type == "file") {
    DemandSeries series = load_demand(path);
    if (static_cast<int>(series.days.size()) < n_days)
      throw std::invalid_argument("demand file has " +
                                  std::to_string(series.days.size()) +
                                  " days, experiment needs " +
                                  std::to_string(n_days));
    series.days.resize(n_days);
    return series;
  }
  throw std::invalid_argument("unknown demand source type '" + type + "'");
}

void ExperimentConfig::validate() const {
  if (n_days < 1) throw std::invalid_argument("config: n_days >= 1");
  if (n_sensors < 1 || n_sensors > tank.n_d)
    throw std::invalid_argument("config: n_sensors must be in [1, n_d]");
  if (!feature_mode.full &&
      (feature_mode.latent_dim < 1 || feature_mode.latent_dim > n_sensors))
    throw std::invalid_argument("config: AE latent dim must be in [1, n_sensors]");
  tank.validate();
  backup.validate();
  regressor.validate();
  if (initial_temp < 0.0 || initial_temp > 100.0)
    throw std::invalid_argument("config: initial_temp must be in [0, 100]");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.n_days = j.value("n_days", cfg.n_days);
  cfg.n_sensors = j.value("n_sensors", cfg.n_sensors);
  if (j.contains("feature_mode"))
    cfg.feature_mode = FeatureMode::parse(j["feature_mode"].get<std::string>());
  if (j.contains("tank")) {
    const auto& t = j["tank"];
    cfg.tank.n_d = t.value("n_d", cfg.tank.n_d);
    cfg.tank.buffer_height = t.value("buffer_height", cfg.tank.buffer_height);
    cfg.tank.diameter = t.value("diameter", cfg.tank.diameter);
    cfg.tank.volume_l = t.value("volume_l", cfg.tank.volume_l);
    cfg.tank.disc_thickness = t.value("disc_thickness", cfg.tank.disc_thickness);
    cfg.tank.outer_surface = t.value("outer_surface", cfg.tank.outer_surface);
    cfg.tank.cross_section = t.value("cross_section", cfg.tank.cross_section);
    cfg.tank.loss_coeff = t.value("loss_coeff", cfg.tank.loss_coeff);
    cfg.tank.conductivity = t.value("conductivity", cfg.tank.conductivity);
    cfg.tank.specific_heat = t.value("specific_heat", cfg.tank.specific_heat);
    cfg.tank.ambient_temp = t.value("ambient_temp", cfg.tank.ambient_temp);
    cfg.tank.inlet_temp = t.value("inlet_temp", cfg.tank.inlet_temp);
    cfg.tank.heater_power = t.value("heater_power", cfg.tank.heater_power);
    cfg.tank.n_heated = t.value("n_heated", cfg.tank.n_heated);
    cfg.tank.t_sim = t.value("t_sim", cfg.tank.t_sim);
    if (t.contains("heated_discs"))
      cfg.tank.heated_discs = t["heated_discs"].get<std::vector<int>>();
  }
  if (j.contains("backup")) {
    const auto& b = j["backup"];
    cfg.backup.soc_lower = b.value("soc_lower", cfg.backup.soc_lower);
    cfg.backup.soc_upper = b.value("soc_upper", cfg.backup.soc_upper);
    cfg.backup.temp_min = b.value("temp_min", cfg.backup.temp_min);
    cfg.backup.temp_max = b.value("temp_max", cfg.backup.temp_max);
    cfg.backup.heater_power = b.value("heater_power", cfg.tank.heater_power);
  } else {
    cfg.backup.heater_power = cfg.tank.heater_power;
  }
  if (j.contains("regressor")) {
    const auto& r = j["regressor"];
    cfg.regressor.n_trees = r.value("n_trees", cfg.regressor.n_trees);
    cfg.regressor.k_splits = r.value("k_splits", cfg.regressor.k_splits);
    cfg.regressor.n_min = r.value("n_min", cfg.regressor.n_min);
  }
  if (j.contains("exploration")) {
    const auto& e = j["exploration"];
    cfg.exploration.tau = e.value("tau_init", cfg.exploration.tau);
    cfg.exploration.delta_tau = e.value("delta_tau", cfg.exploration.delta_tau);
    cfg.exploration.tau_floor = e.value("tau_floor", cfg.exploration.tau_floor);
  }
  if (j.contains("autoencoder")) {
    const auto& a = j["autoencoder"];
    cfg.ae.hidden = a.value("hidden", cfg.ae.hidden);
    cfg.ae.epochs = a.value("epochs", cfg.ae.epochs);
    cfg.ae.tolerance = a.value("tolerance", cfg.ae.tolerance);
    cfg.ae.learning_rate = a.value("learning_rate", cfg.ae.learning_rate);
    cfg.ae.linear_hidden = a.value("linear_hidden", cfg.ae.linear_hidden);
  }
  if (j.contains("price_source")) {
    const auto& p = j["price_source"];
    cfg.price_source.type = p.value("type", cfg.price_source.type);
    cfg.price_source.path = p.value("path", cfg.price_source.path);
    cfg.price_source.seed = p.value("seed", cfg.price_source.seed);
  }
  if (j.contains("demand_source")) {
    const auto& d = j["demand_source"];
    cfg.demand_source.type = d.value("type", cfg.demand_source.type);
    cfg.demand_source.path = d.value("path", cfg.demand_source.path);
    cfg.demand_source.params.mean_daily_volume =
        d.value("mean_daily_volume", cfg.demand_source.params.mean_daily_volume);
    cfg.demand_source.params.morning_weight =
        d.value("morning_weight", cfg.demand_source.params.morning_weight);
    cfg.demand_source.params.evening_weight =
        d.value("evening_weight", cfg.demand_source.params.evening_weight);
    cfg.demand_source.params.noise_scale =
        d.value("noise_scale", cfg.demand_source.params.noise_scale);
    cfg.demand_source.params.seed = d.value("seed", cfg.demand_source.params.seed);
  }
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (j.contains("trace_days"))
    cfg.trace_days = j["trace_days"].get<std::vector<int>>();
  cfg.summary_window_start = j.value("summary_window_start", cfg.summary_window_start);
  cfg.initial_temp = j.value("initial_temp", cfg.initial_temp);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

PeriodResult run_control_period(TankState& tank, int dow, int quarter,
                                int action, double price_eur_kwh,
                                double draw_liters,
                                const ExperimentConfig& cfg) {
  PeriodResult out;
  auto sensors = read_sensors(tank, cfg.n_sensors, cfg.tank);
  out.soc = state_of_charge(sensors, cfg.backup);
  out.u_ph = backup(out.soc, action, cfg.backup);
  const bool heating_on = out.u_ph > 0.0;
  const FlowRate flow{event_flow_kg_s(draw_liters)};
  const int substeps = static_cast<int>(std::lround(900.0 / cfg.tank.t_sim));
  for (int s = 0; s < substeps; ++s)
    tank = step(tank, cfg.tank, heating_on, flow);

  out.cost = (out.u_ph / 1000.0) * price_eur_kwh * kControlPeriodHours;
  out.raw.x = ObservedState{dow, quarter, std::move(sensors)};
  out.raw.u = action;
  int next_q = quarter == kQuartersPerDay ? 1 : quarter + 1;
  int next_dow = quarter == kQuartersPerDay ? dow % 7 + 1 : dow;
  out.raw.x_next = ObservedState{next_dow, next_q,
                                 read_sensors(tank, cfg.n_sensors, cfg.tank)};
  out.raw.u_ph = out.u_ph;
  return out;
}

namespace {

Batch encode_batch(const std::vector<RawTransition>& raw,
                   const AutoencoderModel* model, const ExperimentConfig& cfg,
                   int day_index) {
  Batch batch;
  batch.day_collected = day_index;
  batch.n_sensors = cfg.n_sensors;
  batch.seed = cfg.master_seed;
  batch.transitions.reserve(raw.size());
  for (const RawTransition& r : raw) {
    Transition t;
    t.z = featurize(model, r.x);
    t.u = r.u;
    t.z_next = featurize(model, r.x_next);
    t.u_ph = r.u_ph;
    batch.transitions.push_back(std::move(t));
  }
  return batch;
}

void trace_row(std::vector<std::vector<double>>* trace, int quarter,
               double price, double u_ph, double soc, const TankState& tank) {
  if (!trace) return;
  std::vector<double> row;
  row.reserve(4 + tank.temps.size());
  row.push_back(quarter);
  row.push_back(price);
  row.push_back(u_ph);
  row.push_back(soc);
  row.insert(row.end(), tank.temps.begin(), tank.temps.end());
  trace->push_back(std::move(row));
}

}  // namespace

DayResult run_agent_day(TankState& tank, AgentState& agent, int day_index,
                        const PriceVector& prices,
                        const std::vector<DrawEvent>& demand_day,
                        const ExperimentConfig& cfg, Rng& exploration_rng,
                        std::vector<std::vector<double>>* trace) {
  // morning: retrain features and Q-function on everything collected so far,
  // re-labeled with today's prices
  if (!agent.raw_batch.empty()) {
    if (!cfg.feature_mode.full) {
      std::vector<std::vector<double>> samples;
      samples.reserve(agent.raw_batch.size());
      for (const RawTransition& r : agent.raw_batch) samples.push_back(r.x.sensors);
      agent.ae_model = train_autoencoder(
          samples, cfg.feature_mode.latent_dim, cfg.ae,
          derive_seed(derive_seed(cfg.master_seed, kStreamAutoencoder),
                      static_cast<std::uint64_t>(day_index)));
    }
    const AutoencoderModel* model =
        agent.ae_model.has_value() ? &*agent.ae_model : nullptr;
    Batch batch = encode_batch(agent.raw_batch, model, cfg, day_index);
    ExtraTreesParams params = cfg.regressor;
    params.seed = derive_seed(derive_seed(cfg.master_seed, kStreamRegressor),
                              static_cast<std::uint64_t>(day_index));
    agent.q = fitted_q_iteration(batch, prices, kQuartersPerDay, params);
  }

  // daytime: 96 Boltzmann-controlled periods
  const AutoencoderModel* model =
      agent.ae_model.has_value() ? &*agent.ae_model : nullptr;
  DayResult result;
  result.day = day_index;
  result.controller = "fqi";
  result.tau = agent.exploration.tau;
  std::vector<RawTransition> today;
  today.reserve(kQuartersPerDay);
  const int dow = day_of_week(day_index);
  for (int q = 1; q <= kQuartersPerDay; ++q) {
    auto sensors = read_sensors(tank, cfg.n_sensors, cfg.tank);
    ObservedState x{dow, q, std::move(sensors)};
    FeatureVector z = featurize(model, x);
    int u = boltzmann_sample(agent.q, z, agent.exploration.tau, exploration_rng);
    double liters = 0.0;
    for (const DrawEvent& e : demand_day)
      if (e.quarter == q) liters += e.liters;
    PeriodResult pr = run_control_period(tank, dow, q, u,
                                         prices.values[q - 1], liters, cfg);
    result.cost += pr.cost;
    result.energy_kwh += pr.u_ph * kControlPeriodHours / 1000.0;
    result.min_soc = std::min(result.min_soc, pr.soc);
    trace_row(trace, q, prices.values[q - 1], pr.u_ph, pr.soc, tank);
    today.push_back(std::move(pr.raw));
  }

  // evening: grow the batch and cool the exploration
  agent.raw_batch.insert(agent.raw_batch.end(),
                         std::make_move_iterator(today.begin()),
                         std::make_move_iterator(today.end()));
  agent.exploration = update_tau(agent.exploration);
  return result;
}

DayResult run_thermostat_day(TankState& tank, bool& heating, int day_index,
                             const PriceVector& prices,
                             const std::vector<DrawEvent>& demand_day,
                             const ExperimentConfig& cfg,
                             std::vector<std::vector<double>>* trace) {
  DayResult result;
  result.day = day_index;
  result.controller = "thermostat";
  const int dow = day_of_week(day_index);
  for (int q = 1; q <= kQuartersPerDay; ++q) {
    auto sensors = read_sensors(tank, cfg.n_sensors, cfg.tank);
    double soc = state_of_charge(sensors, cfg.backup);
    heating = thermostat(heating, soc, cfg.backup);
    double liters = 0.0;
    for (const DrawEvent& e : demand_day)
      if (e.quarter == q) liters += e.liters;
    PeriodResult pr = run_control_period(tank, dow, q, heating ? 1 : 0,
                                         prices.values[q - 1], liters, cfg);
    result.cost += pr.cost;
    result.energy_kwh += pr.u_ph * kControlPeriodHours / 1000.0;
    result.min_soc = std::min(result.min_soc, pr.soc);
    trace_row(trace, q, prices.values[q - 1], pr.u_ph, pr.soc, tank);
  }
  return result;
}

namespace {

TankState initial_state(const ExperimentConfig& cfg) {
  TankState s;
  s.temps.assign(cfg.tank.n_d, cfg.initial_temp);
  return s;
}

void write_trace(const std::string& path,
                 const std::vector<std::vector<double>>& rows, int n_layers) {
  std::ofstream out(path);
  out << "quarter,price_eur_kwh,power_w,soc";
  for (int i = 1; i <= n_layers; ++i) out << ",T" << i;
  out << '\n';
  for (const auto& row : rows) {
    out << static_cast<int>(row[0]);
    for (std::size_t i = 1; i < row.size(); ++i) out << ',' << fmt(row[i]);
    out << '\n';
  }
}

void write_results_csv(const std::string& path, const std::vector<DayResult>& days) {
  std::ofstream out(path);
  out << "day,controller,cost_eur,energy_kwh,min_soc,tau\n";
  for (const DayResult& d : days)
    out << d.day << ',' << d.controller << ',' << fmt(d.cost) << ','
        << fmt(d.energy_kwh) << ',' << fmt(d.min_soc) << ',' << fmt(d.tau)
        << '\n';
}

struct Totals {
  double cost = 0.0;
  double energy = 0.0;
  double window_cost = 0.0;
};

Totals accumulate(const std::vector<DayResult>& days, const std::string& ctrl,
                  int window_start) {
  Totals t;
  for (const DayResult& d : days) {
    if (d.controller != ctrl) continue;
    t.cost += d.cost;
    t.energy += d.energy_kwh;
    if (d.day >= window_start) t.window_cost += d.cost;
  }
  return t;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);

  const PriceSeries prices =
      cfg.price_source.realize(cfg.n_days, derive_seed(cfg.master_seed, kStreamPrices));
  const DemandSeries demand =
      cfg.demand_source.realize(cfg.n_days, derive_seed(cfg.master_seed, kStreamDemand));

  ExperimentResult result;
  auto trace_wanted = [&](int day) {
    return std::find(cfg.trace_days.begin(), cfg.trace_days.end(), day) !=
           cfg.trace_days.end();
  };

  // thermostat pass
  {
    TankState tank = initial_state(cfg);
    bool heating = false;
    for (int d = 1; d <= cfg.n_days; ++d) {
      std::vector<std::vector<double>> trace;
      bool want = trace_wanted(d);
      DayResult r = run_thermostat_day(tank, heating, d, prices.days[d - 1].prices,
                                       demand.days[d - 1], cfg,
                                       want ? &trace : nullptr);
      if (want)
        write_trace(cfg.output_dir + "/trace_thermostat_day" + std::to_string(d) +
                        ".csv",
                    trace, cfg.tank.n_d);
      result.days.push_back(std::move(r));
    }
  }

  // learning-agent pass on the identical price/demand realization
  {
    TankState tank = initial_state(cfg);
    AgentState agent;
    agent.exploration = cfg.exploration;
    Rng expl_rng(derive_seed(cfg.master_seed, kStreamExploration));
    for (int d = 1; d <= cfg.n_days; ++d) {
      std::vector<std::vector<double>> trace;
      bool want = trace_wanted(d);
      DayResult r = run_agent_day(tank, agent, d, prices.days[d - 1].prices,
                                  demand.days[d - 1], cfg, expl_rng,
                                  want ? &trace : nullptr);
      if (want)
        write_trace(cfg.output_dir + "/trace_fqi_day" + std::to_string(d) + ".csv",
                    trace, cfg.tank.n_d);
      result.days.push_back(std::move(r));
    }
    Batch batch = encode_batch(agent.raw_batch,
                               agent.ae_model.has_value() ? &*agent.ae_model
                                                          : nullptr,
                               cfg, cfg.n_days);
    save_batch(cfg.output_dir + "/batch.csv", batch);
  }

  write_results_csv(cfg.output_dir + "/results.csv", result.days);

  Totals th = accumulate(result.days, "thermostat", cfg.summary_window_start);
  Totals fq = accumulate(result.days, "fqi", cfg.summary_window_start);
  result.total_cost_thermostat = th.cost;
  result.total_cost_fqi = fq.cost;
  result.saving_fraction =
      th.window_cost > 0.0 ? 1.0 - fq.window_cost / th.window_cost : 0.0;

  int exploration_days = static_cast<int>(std::ceil(
      (cfg.exploration.tau - cfg.exploration.tau_floor) / cfg.exploration.delta_tau));
  nlohmann::json summary;
  summary["n_days"] = cfg.n_days;
  summary["feature_mode"] = cfg.feature_mode.name();
  summary["master_seed"] = cfg.master_seed;
  summary["exploration_days"] = exploration_days;
  summary["summary_window_start"] = cfg.summary_window_start;
  summary["thermostat"] = {{"total_cost_eur", th.cost},
                           {"total_energy_kwh", th.energy},
                           {"window_cost_eur", th.window_cost}};
  summary["fqi"] = {{"total_cost_eur", fq.cost},
                    {"total_energy_kwh", fq.energy},
                    {"window_cost_eur", fq.window_cost}};
  summary["saving_fraction"] = result.saving_fraction;
  std::ofstream(cfg.output_dir + "/summary.json") << summary.dump(2) << '\n';
  return result;
}

ExperimentResult run_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  const PriceSeries prices =
      cfg.price_source.realize(cfg.n_days, derive_seed(cfg.master_seed, kStreamPrices));
  const DemandSeries demand =
      cfg.demand_source.realize(cfg.n_days, derive_seed(cfg.master_seed, kStreamDemand));

  ExperimentResult result;
  TankState tank = initial_state(cfg);
  bool heating = false;
  for (int d = 1; d <= cfg.n_days; ++d)
    result.days.push_back(run_thermostat_day(tank, heating, d,
                                             prices.days[d - 1].prices,
                                             demand.days[d - 1], cfg));
  write_results_csv(cfg.output_dir + "/results.csv", result.days);
  Totals th = accumulate(result.days, "thermostat", cfg.summary_window_start);
  result.total_cost_thermostat = th.cost;
  nlohmann::json summary;
  summary["n_days"] = cfg.n_days;
  summary["thermostat"] = {{"total_cost_eur", th.cost},
                           {"total_energy_kwh", th.energy}};
  std::ofstream(cfg.output_dir + "/summary.json") << summary.dump(2) << '\n';
  return result;
}

namespace {

// One sweep cell: collect a fixed batch, train, score the greedy policy.
double sweep_cell_cost(const ExperimentConfig& base, const FeatureMode& mode,
                       int batch_days, std::uint64_t cell_seed,
                       const std::vector<PriceVector>& eval_prices,
                       const std::vector<std::vector<DrawEvent>>& eval_demand) {
  ExperimentConfig cfg = base;
  cfg.feature_mode = mode;

  // collection phase: alternate thermostat days and random-action days
  DemandGenParams dp = base.demand_source.params;
  dp.seed = derive_seed(cell_seed, 1);
  DemandSeries collect_demand = generate_demand(dp, batch_days);
  std::vector<RawTransition> raws;
  raws.reserve(static_cast<std::size_t>(batch_days) * kQuartersPerDay);
  TankState tank;
  tank.temps.assign(cfg.tank.n_d, cfg.initial_temp);
  Rng action_rng(derive_seed(cell_seed, 2));
  bool heating = false;
  // The first two weeks alternate thermostat days with p=0.5 random days.
  // After that, each nine-day block adds a five-day "drain run" whose heating
  // rate is drawn from U(0, 0.12).  The element is strong enough that single
  // low-rate days never empty the tank, so without multi-day drains the batch
  // contains no transitions where the backup controller takes over and the
  // regressor never sees the cost of running empty.
  double p_heat = 0.5;
  bool thermo_day = true;
  for (int d = 1; d <= batch_days; ++d) {
    const int dow = day_of_week(d);
    if (d <= 14) {
      thermo_day = d % 2 == 1;
      if (!thermo_day) p_heat = 0.5;
    } else {
      const int phase = (d - 15) % 9;
      thermo_day = phase == 0 || phase == 3;
      if (phase == 1) p_heat = 0.5 * action_rng.next_double();
      else if (phase == 4) p_heat = 0.12 * action_rng.next_double();
    }
    for (int q = 1; q <= kQuartersPerDay; ++q) {
      auto sensors = read_sensors(tank, cfg.n_sensors, cfg.tank);
      double soc = state_of_charge(sensors, cfg.backup);
      int u;
      if (thermo_day) {
        heating = thermostat(heating, soc, cfg.backup);
        u = heating ? 1 : 0;
      } else {
        u = action_rng.next_double() < p_heat ? 1 : 0;
      }
      double liters = 0.0;
      for (const DrawEvent& e : collect_demand.days[d - 1])
        if (e.quarter == q) liters += e.liters;
      PeriodResult pr = run_control_period(tank, dow, q, u, 0.0, liters, cfg);
      raws.push_back(std::move(pr.raw));
    }
  }

  std::optional<AutoencoderModel> ae;
  if (!mode.full) {
    std::vector<std::vector<double>> samples;
    samples.reserve(raws.size());
    for (const RawTransition& r : raws) samples.push_back(r.x.sensors);
    ae = train_autoencoder(samples, mode.latent_dim, cfg.ae,
                           derive_seed(cell_seed, 3));
  }
  Batch batch = encode_batch(raws, ae.has_value() ? &*ae : nullptr, cfg,
                             batch_days);

  // evaluation phase: greedy policy on the shared evaluation day set
  double total = 0.0;
  TankState eval_tank;
  eval_tank.temps.assign(cfg.tank.n_d, cfg.initial_temp);
  const AutoencoderModel* model = ae.has_value() ? &*ae : nullptr;
  for (std::size_t e = 0; e < eval_prices.size(); ++e) {
    ExtraTreesParams params = cfg.regressor;
    params.seed = derive_seed(cell_seed, 10 + e);
    QFunction q = fitted_q_iteration(batch, eval_prices[e], kQuartersPerDay, params);
    const int dow = day_of_week(batch_days + static_cast<int>(e) + 1);
    for (int qt = 1; qt <= kQuartersPerDay; ++qt) {
      auto sensors = read_sensors(eval_tank, cfg.n_sensors, cfg.tank);
      ObservedState x{dow, qt, std::move(sensors)};
      int u = greedy_action(q, featurize(model, x));
      double liters = 0.0;
      for (const DrawEvent& ev : eval_demand[e])
        if (ev.quarter == qt) liters += ev.liters;
      PeriodResult pr = run_control_period(eval_tank, dow, qt, u,
                                           eval_prices[e].values[qt - 1], liters,
                                           cfg);
      total += pr.cost;
    }
  }
  return total;
}

}  // namespace

std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<std::string>& modes,
                                 const std::vector<int>& batch_sizes,
                                 int n_seeds, const std::string& out_csv) {
  base.validate();
  if (modes.empty() || batch_sizes.empty() || n_seeds < 1)
    throw std::invalid_argument("run_sweep: empty mode/size list or n_seeds < 1");
  std::vector<FeatureMode> parsed;
  for (const auto& m : modes) parsed.push_back(FeatureMode::parse(m));

  constexpr int kEvalDays = 3;
  PriceSeries eval_price_series = base.price_source.realize(
      kEvalDays, derive_seed(base.master_seed, kStreamPrices));
  std::vector<PriceVector> eval_prices;
  for (const auto& d : eval_price_series.days) eval_prices.push_back(d.prices);
  DemandGenParams edp = base.demand_source.params;
  edp.seed = derive_seed(base.master_seed, kStreamEvalDemand);
  DemandSeries eval_demand_series = generate_demand(edp, kEvalDays);

  struct Job {
    int mode_idx, size_idx, seed_idx;
  };
  std::vector<Job> jobs;
  for (int m = 0; m < static_cast<int>(parsed.size()); ++m)
    for (int s = 0; s < static_cast<int>(batch_sizes.size()); ++s)
      for (int k = 0; k < n_seeds; ++k) jobs.push_back({m, s, k});
  std::vector<double> costs(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < static_cast<int>(jobs.size()); ++j) {
    const Job& job = jobs[j];
    std::uint64_t cell_seed = derive_seed(
        derive_seed(base.master_seed, kStreamSweep),
        (static_cast<std::uint64_t>(job.mode_idx) << 40) ^
            (static_cast<std::uint64_t>(job.size_idx) << 20) ^
            static_cast<std::uint64_t>(job.seed_idx));
    costs[j] = sweep_cell_cost(base, parsed[job.mode_idx],
                               batch_sizes[job.size_idx], cell_seed, eval_prices,
                               eval_demand_series.days);
  }

  std::vector<SweepCell> cells;
  for (int m = 0; m < static_cast<int>(parsed.size()); ++m) {
    for (int s = 0; s < static_cast<int>(batch_sizes.size()); ++s) {
      SweepCell cell;
      cell.mode = parsed[m].name();
      cell.batch_days = batch_sizes[s];
      cell.n_seeds = n_seeds;
      double sum = 0.0;
      for (std::size_t j = 0; j < jobs.size(); ++j)
        if (jobs[j].mode_idx == m && jobs[j].size_idx == s) sum += costs[j];
      cell.mean_cost = sum / n_seeds;
      cells.push_back(std::move(cell));
    }
  }

  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << "mode,batch_days,n_seeds,mean_cost_eur\n";
    for (const SweepCell& c : cells)
      out << c.mode << ',' << c.batch_days << ',' << c.n_seeds << ','
          << fmt(c.mean_cost) << '\n';
  }
  return cells;
}

}  // namespace ewh
