#include "ewh/fqi.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <tuple>

namespace ewh {

double QFunction::value(const FeatureVector& z, int u) const {
  if (zero_) return 0.0;
  std::vector<double> in;
  in.reserve(z.dim() + 1);
  in.push_back(static_cast<double>(z.day));
  in.push_back(static_cast<double>(z.quarter));
  in.insert(in.end(), z.latent.begin(), z.latent.end());
  in.push_back(static_cast<double>(u));
  return model_.predict(in);
}

double cost_relabel(const Transition& t, const PriceVector& prices) {
  const int quarter = t.z.quarter;
  if (quarter < 1 || quarter > kQuartersPerDay)
    throw std::invalid_argument("cost_relabel: quarter out of range");
  return (t.u_ph / 1000.0) * prices.values[quarter - 1] * kControlPeriodHours;
}

namespace {

void append_features(std::vector<double>& row, const FeatureVector& z, double u) {
  row.push_back(static_cast<double>(z.day));
  row.push_back(static_cast<double>(z.quarter));
  row.insert(row.end(), z.latent.begin(), z.latent.end());
  row.push_back(u);
}

// Canonical tuple order so batch permutations cannot change the fit.
bool transition_less(const Transition& a, const Transition& b) {
  auto key = [](const Transition& t) {
    return std::make_tuple(t.z.day, t.z.quarter, t.u, t.u_ph, t.z_next.day,
                           t.z_next.quarter);
  };
  auto ka = key(a), kb = key(b);
  if (ka != kb) return ka < kb;
  if (a.z.latent != b.z.latent) return a.z.latent < b.z.latent;
  return a.z_next.latent < b.z_next.latent;
}

}  // namespace

QFunction fitted_q_iteration(const Batch& batch, const PriceVector& prices,
                             int horizon, const ExtraTreesParams& params) {
  if (batch.transitions.empty())
    throw std::invalid_argument("fitted_q_iteration: empty batch");
  if (horizon < 1)
    throw std::invalid_argument("fitted_q_iteration: horizon must be >= 1");

  std::vector<const Transition*> order;
  order.reserve(batch.transitions.size());
  for (const Transition& t : batch.transitions) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Transition* a, const Transition* b) {
              return transition_less(*a, *b);
            });

  const int n = static_cast<int>(order.size());
  const int z_dim = order.front()->z.dim();
  for (const Transition* t : order)
    if (t->z.dim() != z_dim || t->z_next.dim() != z_dim)
      throw std::invalid_argument("fitted_q_iteration: inconsistent feature dims");
  const int dim = z_dim + 1;

  std::vector<double> x;  // training inputs (z_l, u_l)
  x.reserve(static_cast<std::size_t>(n) * dim);
  std::vector<double> costs(n);
  // (z', 0) and (z', 1) rows for the Bellman minimization
  std::vector<double> x_next0, x_next1;
  x_next0.reserve(static_cast<std::size_t>(n) * dim);
  x_next1.reserve(static_cast<std::size_t>(n) * dim);
  for (int l = 0; l < n; ++l) {
    const Transition& t = *order[l];
    std::vector<double> row;
    row.reserve(dim);
    append_features(row, t.z, static_cast<double>(t.u));
    x.insert(x.end(), row.begin(), row.end());
    costs[l] = cost_relabel(t, prices);
    row.clear();
    append_features(row, t.z_next, 0.0);
    x_next0.insert(x_next0.end(), row.begin(), row.end());
    row.clear();
    append_features(row, t.z_next, 1.0);
    x_next1.insert(x_next1.end(), row.begin(), row.end());
  }

  QFunction q;  // Q_0 identically zero
  std::vector<double> targets(n);
  for (int iter = 1; iter <= horizon; ++iter) {
    if (q.is_zero()) {
      targets = costs;
    } else {
      const ExtraTreesModel& m = q.model();
#pragma omp parallel for schedule(static)
      for (int l = 0; l < n; ++l) {
        std::span<const double> r0(x_next0.data() + static_cast<std::size_t>(l) * dim, dim);
        std::span<const double> r1(x_next1.data() + static_cast<std::size_t>(l) * dim, dim);
        targets[l] = costs[l] + std::min(m.predict(r0), m.predict(r1));
      }
    }
    ExtraTreesParams iter_params = params;
    iter_params.seed = derive_seed(params.seed, static_cast<std::uint64_t>(iter));
    q = QFunction(extra_trees_fit_flat(x, dim, targets, iter_params));
  }
  return q;
}

int greedy_action(const QFunction& q, const FeatureVector& z) {
  return q.value(z, 1) < q.value(z, 0) ? 1 : 0;
}

std::pair<double, double> boltzmann_probs(const QFunction& q,
                                          const FeatureVector& z, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("boltzmann_probs: tau must be > 0");
  double q0 = q.value(z, 0);
  double q1 = q.value(z, 1);
  double lo = std::min(q0, q1), hi = std::max(q0, q1);
  double s0 = 0.0, s1 = 0.0;
  if (hi > lo) {  // rescale the pair to span [0, 100]
    s0 = 100.0 * (q0 - lo) / (hi - lo);
    s1 = 100.0 * (q1 - lo) / (hi - lo);
  }
  // Q is cost-to-go: exponentiate the negated scaled values so cheap actions
  // gain probability as tau decreases.
  double e0 = std::exp(-s0 / tau);
  double e1 = std::exp(-s1 / tau);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

int boltzmann_sample(const QFunction& q, const FeatureVector& z, double tau,
                     Rng& rng) {
  auto [p0, p1] = boltzmann_probs(q, z, tau);
  (void)p1;
  return rng.next_double() < p0 ? 0 : 1;
}

ExplorationState update_tau(const ExplorationState& state) {
  ExplorationState next = state;
  next.tau = std::max(state.tau - state.delta_tau, state.tau_floor);
  return next;
}

}  // namespace ewh
