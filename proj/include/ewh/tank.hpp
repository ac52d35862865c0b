#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ewh {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stratified buffer tank: n_d stacked discs, index 0 at the top (hot outlet),
// index n_d-1 at the bottom (cold inlet).
struct TankParams {
  int n_d = 50;                   // disc count
  double buffer_height = 1.2;     // m
  double diameter = 0.5;          // m
  double volume_l = 200.0;        // total water volume, liters
  double disc_thickness = 0.025;  // m
  double outer_surface = 0.0393;  // m^2, loss surface per disc
  double cross_section = 0.1963;  // m^2, conduction area between discs
  double loss_coeff = 0.8;        // W/(m^2 K)
  double conductivity = 0.5944;   // W/(m K)
  double specific_heat = 4185.5;  // J/(kg K)
  double ambient_temp = 20.0;     // degC
  double inlet_temp = 10.0;       // degC
  double heater_power = 2360.0;   // W
  int n_heated = 5;
  double t_sim = 6.0;             // s
  std::vector<int> heated_discs;  // empty => default placement

  // Disc mass from total volume; the disc geometry in the data sheet is not
  // consistent with volume_l, so volume wins.
  double disc_mass() const { return volume_l / n_d; }

  // n_heated discs centered on the lower third of the tank.
  static std::vector<int> default_heated(int n_d, int n_heated);

  std::vector<int> resolved_heated() const;
  void validate() const;
};

struct TankState {
  std::vector<double> temps;  // degC, top to bottom
};

struct FlowRate {
  double mdot = 0.0;  // kg/s, uniform across discs during a step
};

// A*U*(T_a - T_i). Positive when the ambient is warmer than the disc.
double disc_loss(double temp, const TankParams& params);

// Net conductive outflow toward both neighbours; missing-neighbour terms are
// dropped at the top and bottom discs.
double disc_conduction(const TankState& state, int i, const TankParams& params);

// Advective exchange with both neighbours at tap flow mdot. The bottom disc
// exchanges with inlet water at T_in; the top disc has no upper term.
double disc_mixing(const TankState& state, int i, const FlowRate& flow,
                   const TankParams& params);

// P_e/n_h on heated discs while the element is on.
double disc_heating(int i, bool heating_on, const TankParams& params);

// One explicit-Euler step of t_sim seconds followed by the buoyancy fix-up.
// Throws SimulationError when a temperature leaves [0, 100] or turns
// non-finite (t_sim too coarse for the parameters).
TankState step(const TankState& state, const TankParams& params,
               bool heating_on, const FlowRate& flow);

// Euler update without the buoyancy pass; exposed for the energy-balance
// checks.
TankState euler_update(const TankState& state, const TankParams& params,
                       bool heating_on, const FlowRate& flow);

// Repeatedly replaces any disc hotter than the disc above it by the average of
// its two neighbours until the profile is monotone non-increasing downward.
TankState buoyancy_mix(const TankState& state);

// Mean temperature of n_s contiguous top-to-bottom segments.
std::vector<double> read_sensors(const TankState& state, int n_sensors,
                                 const TankParams& params);

// Total stored energy relative to 0 degC, J.
double tank_energy(const TankState& state, const TankParams& params);

}  // namespace ewh
