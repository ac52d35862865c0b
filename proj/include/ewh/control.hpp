#pragma once

#include <span>

namespace ewh {

struct BackupConfig {
  double soc_lower = 0.2;
  double soc_upper = 1.0;
  double temp_min = 45.0;   // comfort floor, degC
  double temp_max = 65.0;   // comfort ceiling, degC
  double heater_power = 2360.0;  // W

  void validate() const;
};

// Mean over sensors of clip((T - T_min)/(T_max - T_min), 0, 1).
double state_of_charge(std::span<const double> sensors, const BackupConfig& cfg);

// Backup controller: forces full power below the lower charge bound, forces
// off at the upper bound, passes the agent action through in between.
// Returns the physical power in W.
double backup(double soc, int action, const BackupConfig& cfg);

// Default thermostat: switches on below soc_lower and stays on until the
// state of charge reaches 100%.
bool thermostat(bool prev_heating, double soc, const BackupConfig& cfg);

}  // namespace ewh
