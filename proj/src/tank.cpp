#include "ewh/tank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ewh {

std::vector<int> TankParams::default_heated(int n_d, int n_heated) {
  // the heating resistance sits at the bottom of the tank, covering the
  // lowest discs, so buoyancy can distribute its heat over the whole volume
  std::vector<int> out(n_heated);
  std::iota(out.begin(), out.end(), n_d - n_heated);
  return out;
}

std::vector<int> TankParams::resolved_heated() const {
  if (!heated_discs.empty()) return heated_discs;
  return default_heated(n_d, n_heated);
}

void TankParams::validate() const {
  if (n_d < 2) throw std::invalid_argument("TankParams: n_d must be >= 2");
  if (n_heated < 1 || n_heated > n_d)
    throw std::invalid_argument("TankParams: n_heated out of range");
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(buffer_height) || !positive(diameter) || !positive(volume_l) ||
      !positive(disc_thickness) || !positive(outer_surface) ||
      !positive(cross_section) || !positive(loss_coeff) ||
      !positive(conductivity) || !positive(specific_heat) ||
      !positive(heater_power) || !positive(t_sim))
    throw std::invalid_argument("TankParams: physical quantities must be positive");
  auto heated = resolved_heated();
  if (static_cast<int>(heated.size()) != n_heated)
    throw std::invalid_argument("TankParams: heated disc list size != n_heated");
  for (int i : heated)
    if (i < 0 || i >= n_d)
      throw std::invalid_argument("TankParams: heated disc index out of range");
}

double disc_loss(double temp, const TankParams& params) {
  return params.outer_surface * params.loss_coeff * (params.ambient_temp - temp);
}

static void check_index(int i, const TankParams& params) {
  if (i < 0 || i >= params.n_d)
    throw std::out_of_range("disc index out of range");
}

double disc_conduction(const TankState& state, int i, const TankParams& params) {
  check_index(i, params);
  const double coef =
      params.conductivity * params.cross_section / params.disc_thickness;
  double q = 0.0;
  if (i + 1 < params.n_d) q += coef * (state.temps[i] - state.temps[i + 1]);
  if (i - 1 >= 0) q += coef * (state.temps[i] - state.temps[i - 1]);
  return q;
}

double disc_mixing(const TankState& state, int i, const FlowRate& flow,
                   const TankParams& params) {
  check_index(i, params);
  const double mc = flow.mdot * params.specific_heat;
  double q = 0.0;
  // below: the bottom disc sees inlet water instead of a lower neighbour
  double below = (i + 1 < params.n_d) ? state.temps[i + 1] : params.inlet_temp;
  q += mc * (state.temps[i] - below);
  // above: water exits at the top, no upper term for disc 0
  if (i - 1 >= 0) q += mc * (state.temps[i] - state.temps[i - 1]);
  return q;
}

double disc_heating(int i, bool heating_on, const TankParams& params) {
  if (!heating_on) return 0.0;
  auto heated = params.resolved_heated();
  if (std::find(heated.begin(), heated.end(), i) == heated.end()) return 0.0;
  return params.heater_power / params.n_heated;
}

TankState euler_update(const TankState& state, const TankParams& params,
                       bool heating_on, const FlowRate& flow) {
  const int n = params.n_d;
  const double dt = params.t_sim;
  const double mc = params.disc_mass() * params.specific_heat;
  const auto heated = params.resolved_heated();
  std::vector<char> is_heated(n, 0);
  for (int i : heated) is_heated[i] = 1;
  const double q_heat = params.heater_power / params.n_heated;

  TankState next;
  next.temps.resize(n);
  const double cond = params.conductivity * params.cross_section / params.disc_thickness;
  const double mdot_c = flow.mdot * params.specific_heat;
  for (int i = 0; i < n; ++i) {
    const double t_i = state.temps[i];
    double q_l = params.outer_surface * params.loss_coeff * (params.ambient_temp - t_i);
    double q_c = 0.0;
    if (i + 1 < n) q_c += cond * (t_i - state.temps[i + 1]);
    if (i - 1 >= 0) q_c += cond * (t_i - state.temps[i - 1]);
    double q_m = mdot_c * (t_i - (i + 1 < n ? state.temps[i + 1] : params.inlet_temp));
    if (i - 1 >= 0) q_m += mdot_c * (t_i - state.temps[i - 1]);
    double q_h = (heating_on && is_heated[i]) ? q_heat : 0.0;
    next.temps[i] = t_i + dt * (q_l - q_c - q_m + q_h) / mc;
  }
  return next;
}

TankState buoyancy_mix(const TankState& state) {
  constexpr double kEps = 1e-9;
  TankState out = state;
  const int n = static_cast<int>(out.temps.size());
  const long max_sweeps = 10L * n * n;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    bool unstable = false;
    // bottom-to-top: a disc hotter than the disc above it mixes with that
    // disc; equal-mass discs, so the pair settles at its mean (conserves
    // energy and strictly reduces thermal variance, which guarantees
    // termination)
    for (int i = n - 1; i >= 1; --i) {
      if (out.temps[i] > out.temps[i - 1] + kEps) {
        double mean = 0.5 * (out.temps[i] + out.temps[i - 1]);
        out.temps[i] = mean;
        out.temps[i - 1] = mean;
        unstable = true;
      }
    }
    if (!unstable) return out;
  }
  // cap exceeded, best effort
  return out;
}

TankState step(const TankState& state, const TankParams& params,
               bool heating_on, const FlowRate& flow) {
  if (static_cast<int>(state.temps.size()) != params.n_d)
    throw std::invalid_argument("TankState size does not match n_d");
  if (flow.mdot < 0.0) throw std::invalid_argument("negative flow rate");
  TankState next = euler_update(state, params, heating_on, flow);
  for (double t : next.temps) {
    if (!std::isfinite(t) || t < 0.0 || t > 100.0)
      throw SimulationError(
          "simulator instability: disc temperature left [0,100] degC "
          "(t_sim too coarse for parameters)");
  }
  return buoyancy_mix(next);
}

std::vector<double> read_sensors(const TankState& state, int n_sensors,
                                 const TankParams& params) {
  if (n_sensors < 1 || n_sensors > params.n_d)
    throw std::invalid_argument("sensor count out of range");
  std::vector<double> out(n_sensors);
  for (int s = 0; s < n_sensors; ++s) {
    int begin = s * params.n_d / n_sensors;
    int end = (s + 1) * params.n_d / n_sensors;
    double sum = 0.0;
    for (int i = begin; i < end; ++i) sum += state.temps[i];
    out[s] = sum / (end - begin);
  }
  return out;
}

double tank_energy(const TankState& state, const TankParams& params) {
  const double mc = params.disc_mass() * params.specific_heat;
  double e = 0.0;
  for (double t : state.temps) e += mc * t;
  return e;
}

}  // namespace ewh
