#include "ewh/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace ewh {

void BackupConfig::validate() const {
  if (!(soc_lower >= 0.0 && soc_lower < soc_upper && soc_upper <= 1.0))
    throw std::invalid_argument("BackupConfig: need 0 <= soc_lower < soc_upper <= 1");
  if (!(temp_min < temp_max && temp_max <= 100.0))
    throw std::invalid_argument("BackupConfig: need temp_min < temp_max <= 100");
  if (heater_power <= 0.0)
    throw std::invalid_argument("BackupConfig: heater_power must be positive");
}

double state_of_charge(std::span<const double> sensors, const BackupConfig& cfg) {
  if (sensors.empty())
    throw std::invalid_argument("state_of_charge: empty sensor vector");
  const double range = cfg.temp_max - cfg.temp_min;
  double sum = 0.0;
  for (double t : sensors)
    sum += std::clamp((t - cfg.temp_min) / range, 0.0, 1.0);
  return sum / static_cast<double>(sensors.size());
}

double backup(double soc, int action, const BackupConfig& cfg) {
  if (soc <= cfg.soc_lower) return cfg.heater_power;
  if (soc >= cfg.soc_upper) return 0.0;
  return action ? cfg.heater_power : 0.0;
}

bool thermostat(bool prev_heating, double soc, const BackupConfig& cfg) {
  if (soc < cfg.soc_lower) return true;
  if (prev_heating && soc < 1.0) return true;
  return false;
}

}  // namespace ewh
