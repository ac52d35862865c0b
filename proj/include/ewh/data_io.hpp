#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewh/fqi.hpp"

namespace ewh {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PriceDay {
  std::string date;
  PriceVector prices;
};

struct PriceSeries {
  std::vector<PriceDay> days;
};

struct DrawEvent {
  int quarter = 1;       // 1..96
  double liters = 0.0;
};

struct DemandSeries {
  std::vector<std::vector<DrawEvent>> days;
};

struct DemandGenParams {
  double mean_daily_volume = 120.0;  // liters
  double morning_weight = 1.0;
  double evening_weight = 1.0;
  double noise_scale = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

// CSV layout: header "date,<unit>" with unit EUR/kWh or EUR/MWh, then one row
// per day "label,v1,...,v96". EUR/MWh values are converted to EUR/kWh.
PriceSeries load_prices(const std::string& path);
void save_prices(const std::string& path, const PriceSeries& series,
                 const std::string& unit = "EUR/kWh");

// CSV layout: header "day,quarter,liters", one row per draw event.
DemandSeries load_demand(const std::string& path);
void save_demand(const std::string& path, const DemandSeries& series);

// Stochastic draw schedule with morning/evening peaks; pure function of
// (params, n_days).
DemandSeries generate_demand(const DemandGenParams& params, int n_days);

// Synthetic price fixtures standing in for market data: a smooth diurnal
// day-ahead-like profile and a volatile imbalance-like profile.
PriceSeries generate_dayahead_prices(int n_days, std::uint64_t seed);
PriceSeries generate_imbalance_prices(int n_days, std::uint64_t seed);

// Line-delimited batch persistence; round-trips bit-exactly.
void save_batch(const std::string& path, const Batch& batch);
Batch load_batch(const std::string& path);

// A draw event spread uniformly over its 15-minute quarter, kg/s.
double event_flow_kg_s(double liters);

// Total flow during one quarter of a demand day.
double quarter_flow_kg_s(const std::vector<DrawEvent>& day, int quarter);

}  // namespace ewh
