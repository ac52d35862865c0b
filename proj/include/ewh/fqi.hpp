#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "ewh/autoencoder.hpp"
#include "ewh/extra_trees.hpp"
#include "ewh/seeds.hpp"

namespace ewh {

inline constexpr int kQuartersPerDay = 96;
inline constexpr double kControlPeriodHours = 0.25;

// Four-tuple collected during operation. The cost is deliberately absent; it
// is re-derived every day from that day's price vector.
struct Transition {
  FeatureVector z;
  int u = 0;            // agent action, 0/1
  FeatureVector z_next;
  double u_ph = 0.0;    // physical power applied, W
};

struct Batch {
  std::vector<Transition> transitions;
  int day_collected = 0;
  int n_sensors = 0;
  std::uint64_t seed = 0;
};

struct PriceVector {
  std::array<double, kQuartersPerDay> values{};  // EUR/kWh, index 0 = quarter 1
};

// Q-function over concatenated (z, u) inputs; identically zero before the
// first fit.
class QFunction {
 public:
  QFunction() = default;
  explicit QFunction(ExtraTreesModel model) : zero_(false), model_(std::move(model)) {}

  bool is_zero() const { return zero_; }
  double value(const FeatureVector& z, int u) const;
  const ExtraTreesModel& model() const { return model_; }

 private:
  bool zero_ = true;
  ExtraTreesModel model_;
};

// c = u_ph [kW] * lambda_t [EUR/kWh] * 0.25 h, with t the quarter stored in z.
double cost_relabel(const Transition& t, const PriceVector& prices);

// T iterations of Bellman backups regressed with extremely randomized trees.
QFunction fitted_q_iteration(const Batch& batch, const PriceVector& prices,
                             int horizon, const ExtraTreesParams& params);

// argmin over {0,1}; ties go to 0 (consume nothing).
int greedy_action(const QFunction& q, const FeatureVector& z);

// Action probabilities after linearly rescaling the Q pair to [0,100];
// low-cost actions get the higher probability.
std::pair<double, double> boltzmann_probs(const QFunction& q,
                                          const FeatureVector& z, double tau);

int boltzmann_sample(const QFunction& q, const FeatureVector& z, double tau,
                     Rng& rng);

struct ExplorationState {
  double tau = 100.0;
  double delta_tau = 10.0;
  double tau_floor = 1.0;
};

ExplorationState update_tau(const ExplorationState& state);

}  // namespace ewh
