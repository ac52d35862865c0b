#include "ewh/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ewh/seeds.hpp"

namespace ewh {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, int row, int col) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": non-numeric value '" + field + "'");
  return v;
}

long parse_int(const std::string& field, int row, int col) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": non-numeric value '" + field + "'");
  return v;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

}  // namespace

PriceSeries load_prices(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": missing header row");
  auto header = split_csv(line);
  if (header.empty() || header[0] != "date")
    throw ParseError(path + ": header must start with 'date'");
  double scale = 1.0;
  std::string unit = header.size() > 1 ? header[1] : "EUR/kWh";
  if (unit == "EUR/MWh") {
    scale = 1e-3;
  } else if (unit != "EUR/kWh") {
    throw ParseError(path + ": unknown price unit '" + unit + "'");
  }

  PriceSeries series;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != 1 + kQuartersPerDay)
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(kQuartersPerDay) + " values, got " +
                       std::to_string(fields.size() - 1));
    PriceDay day;
    day.date = fields[0];
    for (int q = 0; q < kQuartersPerDay; ++q) {
      double v = parse_double(fields[q + 1], row, q + 2) * scale;
      if (!std::isfinite(v))
        throw ParseError("row " + std::to_string(row) + ", column " +
                         std::to_string(q + 2) + ": non-finite price");
      day.prices.values[q] = v;
    }
    series.days.push_back(std::move(day));
  }
  return series;
}

void save_prices(const std::string& path, const PriceSeries& series,
                 const std::string& unit) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  double scale = unit == "EUR/MWh" ? 1e3 : 1.0;
  out << "date," << unit << "\n";
  for (const auto& day : series.days) {
    out << day.date;
    for (double v : day.prices.values) out << ',' << fmt_double(v * scale);
    out << '\n';
  }
}

DemandSeries load_demand(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  DemandSeries series;
  if (!std::getline(in, line)) return series;  // empty file: empty series
  auto header = split_csv(line);
  if (header.size() != 3 || header[0] != "day")
    throw ParseError(path + ": expected header 'day,quarter,liters'");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 3)
      throw ParseError("row " + std::to_string(row) +
                       ": expected 3 fields, got " + std::to_string(fields.size()));
    long day = parse_int(fields[0], row, 1);
    long quarter = parse_int(fields[1], row, 2);
    double liters = parse_double(fields[2], row, 3);
    if (day < 1)
      throw ParseError("row " + std::to_string(row) + ": day must be >= 1");
    if (quarter < 1 || quarter > kQuartersPerDay)
      throw ParseError("row " + std::to_string(row) + ": quarter out of range");
    if (liters < 0.0)
      throw ParseError("row " + std::to_string(row) + ": negative volume");
    if (static_cast<std::size_t>(day) > series.days.size())
      series.days.resize(day);
    series.days[day - 1].push_back({static_cast<int>(quarter), liters});
  }
  return series;
}

void save_demand(const std::string& path, const DemandSeries& series) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << "day,quarter,liters\n";
  for (std::size_t d = 0; d < series.days.size(); ++d)
    for (const DrawEvent& e : series.days[d])
      out << (d + 1) << ',' << e.quarter << ',' << fmt_double(e.liters) << '\n';
}

void DemandGenParams::validate() const {
  if (mean_daily_volume <= 0.0)
    throw std::invalid_argument("DemandGenParams: mean_daily_volume must be > 0");
  if (morning_weight < 0.0 || evening_weight < 0.0 ||
      (morning_weight == 0.0 && evening_weight == 0.0))
    throw std::invalid_argument("DemandGenParams: weights non-negative, not all zero");
  if (noise_scale < 0.0)
    throw std::invalid_argument("DemandGenParams: noise_scale must be >= 0");
}

DemandSeries generate_demand(const DemandGenParams& params, int n_days) {
  params.validate();
  if (n_days < 1) throw std::invalid_argument("generate_demand: n_days >= 1");

  // diurnal weight profile: morning peak around 07:30, evening around 19:00
  std::array<double, kQuartersPerDay> weight{};
  for (int q = 0; q < kQuartersPerDay; ++q) {
    double hour = (q + 0.5) * 0.25;
    auto peak = [&](double center, double width) {
      double d = (hour - center) / width;
      return std::exp(-0.5 * d * d);
    };
    weight[q] = 0.05 + params.morning_weight * peak(7.5, 1.5) +
                params.evening_weight * peak(19.0, 2.0);
  }
  std::array<double, kQuartersPerDay> cdf{};
  double total = 0.0;
  for (int q = 0; q < kQuartersPerDay; ++q) {
    total += weight[q];
    cdf[q] = total;
  }
  for (double& v : cdf) v /= total;

  constexpr int kEventsPerDay = 10;
  DemandSeries series;
  series.days.resize(n_days);
  Rng rng(derive_seed(params.seed, 0xdeaf));
  for (int d = 0; d < n_days; ++d) {
    double vol_factor = std::clamp(1.0 + params.noise_scale * rng.next_gaussian(),
                                   0.05, 2.0);
    double event_liters = params.mean_daily_volume * vol_factor / kEventsPerDay;
    for (int e = 0; e < kEventsPerDay; ++e) {
      // quantile placement keeps days identical when noise_scale is zero
      double target = (e + 0.5) / kEventsPerDay;
      int q = static_cast<int>(
          std::lower_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
      double jitter = params.noise_scale * rng.next_gaussian() * 8.0;
      q = std::clamp(q + static_cast<int>(std::lround(jitter)), 0,
                     kQuartersPerDay - 1);
      series.days[d].push_back({q + 1, event_liters});
    }
  }
  return series;
}

PriceSeries generate_dayahead_prices(int n_days, std::uint64_t seed) {
  if (n_days < 1) throw std::invalid_argument("n_days >= 1");
  PriceSeries series;
  Rng rng(derive_seed(seed, 0xda));
  for (int d = 0; d < n_days; ++d) {
    PriceDay day;
    day.date = "day" + std::to_string(d + 1);
    double level = 0.055 + 0.01 * rng.next_gaussian();
    for (int q = 0; q < kQuartersPerDay; ++q) {
      double hour = (q + 0.5) * 0.25;
      // smooth diurnal shape: cheap at night, peaks morning and evening
      double shape = 0.02 * std::sin((hour - 4.0) * 2.0 * M_PI / 24.0) +
                     0.012 * std::sin((hour - 7.0) * 4.0 * M_PI / 24.0);
      double v = level + shape + 0.002 * rng.next_gaussian();
      day.prices.values[q] = std::max(v, 0.0);
    }
    series.days.push_back(std::move(day));
  }
  return series;
}

PriceSeries generate_imbalance_prices(int n_days, std::uint64_t seed) {
  if (n_days < 1) throw std::invalid_argument("n_days >= 1");
  PriceSeries series;
  Rng rng(derive_seed(seed, 0x1b));
  for (int d = 0; d < n_days; ++d) {
    PriceDay day;
    day.date = "day" + std::to_string(d + 1);
    double level = 0.07 + 0.015 * rng.next_gaussian();
    double ar = 0.0;  // slow AR(1) component, real-time imbalance drift
    int event_left = 0;
    double event_mag = 0.0;
    for (int q = 0; q < kQuartersPerDay; ++q) {
      double hour = (q + 0.5) * 0.25;
      // pronounced diurnal swing: cheap nights, expensive daytime
      double shape = 0.045 * std::sin((hour - 4.0) * 2.0 * M_PI / 24.0);
      ar = 0.95 * ar + 0.012 * rng.next_gaussian();
      if (event_left == 0 && rng.next_double() < 0.02) {
        // scarcity spikes and surplus dips arrive in multi-quarter blocks
        event_left = 2 + rng.next_below(5);
        event_mag = rng.next_double() < 0.5 ? rng.uniform(0.15, 0.35)
                                            : -rng.uniform(0.05, 0.12);
      }
      double v = level + shape + ar;
      if (event_left > 0) {
        v += event_mag;
        --event_left;
      }
      day.prices.values[q] = std::clamp(v, 0.0, 0.6);
    }
    series.days.push_back(std::move(day));
  }
  return series;
}

namespace {
void write_feature(std::ostream& out, const FeatureVector& z) {
  out << z.day << ',' << z.quarter;
  for (double v : z.latent) out << ',' << fmt_double(v);
}
}  // namespace

void save_batch(const std::string& path, const Batch& batch) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  int latent_dim = batch.transitions.empty()
                       ? 0
                       : static_cast<int>(batch.transitions.front().z.latent.size());
  out << "ewh-batch,v1,latent_dim=" << latent_dim
      << ",n_sensors=" << batch.n_sensors
      << ",day_collected=" << batch.day_collected << ",seed=" << batch.seed
      << "\n";
  for (const Transition& t : batch.transitions) {
    write_feature(out, t.z);
    out << ',' << t.u << ',';
    write_feature(out, t.z_next);
    out << ',' << fmt_double(t.u_ph) << '\n';
  }
}

Batch load_batch(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": missing batch header");
  auto header = split_csv(line);
  if (header.size() < 6 || header[0] != "ewh-batch" || header[1] != "v1")
    throw ParseError(path + ": not an ewh-batch v1 file");
  auto field_value = [&](int i, const std::string& name) -> std::string {
    const std::string& f = header[i];
    auto pos = f.find('=');
    if (pos == std::string::npos || f.substr(0, pos) != name)
      throw ParseError(path + ": malformed header field '" + f + "'");
    return f.substr(pos + 1);
  };
  int latent_dim = static_cast<int>(parse_int(field_value(2, "latent_dim"), 1, 3));
  Batch batch;
  batch.n_sensors = static_cast<int>(parse_int(field_value(3, "n_sensors"), 1, 4));
  batch.day_collected = static_cast<int>(parse_int(field_value(4, "day_collected"), 1, 5));
  batch.seed = static_cast<std::uint64_t>(parse_int(field_value(5, "seed"), 1, 6));

  const int expected = 2 * (2 + latent_dim) + 2;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != expected)
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(expected) + " fields, got " +
                       std::to_string(fields.size()));
    Transition t;
    int col = 0;
    auto read_feature = [&](FeatureVector& z) {
      z.day = static_cast<int>(parse_int(fields[col], row, col + 1));
      ++col;
      z.quarter = static_cast<int>(parse_int(fields[col], row, col + 1));
      ++col;
      z.latent.resize(latent_dim);
      for (int i = 0; i < latent_dim; ++i) {
        z.latent[i] = parse_double(fields[col], row, col + 1);
        ++col;
      }
    };
    read_feature(t.z);
    t.u = static_cast<int>(parse_int(fields[col], row, col + 1));
    ++col;
    read_feature(t.z_next);
    t.u_ph = parse_double(fields[col], row, col + 1);
    batch.transitions.push_back(std::move(t));
  }
  return batch;
}

double event_flow_kg_s(double liters) { return liters / 900.0; }

double quarter_flow_kg_s(const std::vector<DrawEvent>& day, int quarter) {
  double liters = 0.0;
  for (const DrawEvent& e : day)
    if (e.quarter == quarter) liters += e.liters;
  return event_flow_kg_s(liters);
}

}  // namespace ewh
