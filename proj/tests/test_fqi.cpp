#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ewh/fqi.hpp"

using namespace ewh;

namespace {

FeatureVector fv(int day, int quarter, std::vector<double> latent) {
  FeatureVector z;
  z.day = day;
  z.quarter = quarter;
  z.latent = std::move(latent);
  return z;
}

// Deterministic 2-state, 2-action toy MDP on a 4-quarter cycle. State flips
// when the heater runs; cost is u_ph * price(quarter) * dt.
struct ToyMdp {
  static constexpr int kHorizon = 4;
  std::array<double, 4> lambda{0.10, 0.40, 0.05, 0.30};

  int next_state(int s, int u) const { return u ? 1 - s : s; }
  int next_quarter(int t) const { return t % kHorizon + 1; }
  double cost(int u, int t) const {
    return u ? 2.36 * lambda[t - 1] * kControlPeriodHours : 0.0;
  }

  Batch exhaustive_batch() const {
    Batch batch;
    for (int t = 1; t <= kHorizon; ++t)
      for (int s = 0; s <= 1; ++s)
        for (int u = 0; u <= 1; ++u) {
          Transition tr;
          tr.z = fv(1, t, {static_cast<double>(s)});
          tr.u = u;
          tr.z_next = fv(1, next_quarter(t), {static_cast<double>(next_state(s, u))});
          tr.u_ph = u ? 2360.0 : 0.0;
          batch.transitions.push_back(std::move(tr));
        }
    return batch;
  }

  PriceVector prices() const {
    PriceVector p;
    for (int t = 1; t <= kHorizon; ++t) p.values[t - 1] = lambda[t - 1];
    return p;
  }

  // independent finite-horizon value iteration oracle
  std::map<std::tuple<int, int, int>, double> value_iteration(int horizon) const {
    std::map<std::pair<int, int>, double> v;  // (t, s) -> cost-to-go
    for (int t = 1; t <= kHorizon; ++t)
      for (int s = 0; s <= 1; ++s) v[{t, s}] = 0.0;
    std::map<std::tuple<int, int, int>, double> q;
    for (int n = 1; n <= horizon; ++n) {
      std::map<std::pair<int, int>, double> v_next;
      for (int t = 1; t <= kHorizon; ++t)
        for (int s = 0; s <= 1; ++s) {
          double best = std::numeric_limits<double>::infinity();
          for (int u = 0; u <= 1; ++u) {
            double qv = cost(u, t) + v[{next_quarter(t), next_state(s, u)}];
            q[{t, s, u}] = qv;
            best = std::min(best, qv);
          }
          v_next[{t, s}] = best;
        }
      v = std::move(v_next);
    }
    return q;
  }
};

}  // namespace

TEST_CASE("cost_relabel") {
  Transition t;
  t.z = fv(1, 10, {0.5});
  PriceVector prices;
  prices.values.fill(0.05);

  SUBCASE("zero power, zero cost") {
    t.u_ph = 0.0;
    CHECK(cost_relabel(t, prices) == doctest::Approx(0.0));
  }
  SUBCASE("full power at 0.05 EUR/kWh") {
    t.u_ph = 2360.0;
    CHECK(cost_relabel(t, prices) == doctest::Approx(0.0295));
  }
  SUBCASE("linear in the price") {
    t.u_ph = 2360.0;
    double c1 = cost_relabel(t, prices);
    for (auto& v : prices.values) v *= 2.0;
    CHECK(cost_relabel(t, prices) == doctest::Approx(2.0 * c1));
  }
  SUBCASE("quarter indexes the price vector") {
    t.u_ph = 2360.0;
    prices.values[9] = 0.2;  // quarter 10
    CHECK(cost_relabel(t, prices) == doctest::Approx(2.36 * 0.2 * 0.25));
  }
}

TEST_CASE("fitted_q_iteration with zero prices is identically zero") {
  ToyMdp mdp;
  Batch batch = mdp.exhaustive_batch();
  PriceVector zero;
  zero.values.fill(0.0);
  auto q = fitted_q_iteration(batch, zero, 4, {.n_trees = 5, .seed = 1});
  for (const Transition& t : batch.transitions)
    CHECK(q.value(t.z, t.u) == doctest::Approx(0.0));
}

TEST_CASE("first iteration targets equal immediate re-labeled costs") {
  ToyMdp mdp;
  Batch batch = mdp.exhaustive_batch();
  auto q = fitted_q_iteration(batch, mdp.prices(), 1,
                              {.n_trees = 20, .n_min = 2, .seed = 2});
  for (const Transition& t : batch.transitions) {
    double expect = cost_relabel(t, mdp.prices());
    CHECK(q.value(t.z, t.u) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("toy MDP matches the value-iteration oracle") {
  ToyMdp mdp;
  Batch batch = mdp.exhaustive_batch();
  auto q = fitted_q_iteration(batch, mdp.prices(), ToyMdp::kHorizon,
                              {.n_trees = 30, .n_min = 2, .seed = 3});
  auto oracle = mdp.value_iteration(ToyMdp::kHorizon);
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -q_min;
  for (const auto& [k, v] : oracle) {
    q_min = std::min(q_min, v);
    q_max = std::max(q_max, v);
  }
  double worst = 0.0;
  for (const auto& [k, expect] : oracle) {
    auto [t, s, u] = k;
    double got = q.value(fv(1, t, {static_cast<double>(s)}), u);
    worst = std::max(worst, std::abs(got - expect));
  }
  CHECK(worst <= 0.05 * (q_max - q_min));
}

TEST_CASE("targets stay non-negative for non-negative prices") {
  ToyMdp mdp;
  Batch batch = mdp.exhaustive_batch();
  auto q = fitted_q_iteration(batch, mdp.prices(), ToyMdp::kHorizon,
                              {.n_trees = 10, .seed = 4});
  for (const Transition& t : batch.transitions) {
    CHECK(q.value(t.z, 0) >= 0.0);
    CHECK(q.value(t.z, 1) >= 0.0);
  }
}

TEST_CASE("batch permutation leaves predictions unchanged") {
  ToyMdp mdp;
  Batch batch = mdp.exhaustive_batch();
  Batch shuffled = batch;
  std::reverse(shuffled.transitions.begin(), shuffled.transitions.end());
  std::swap(shuffled.transitions[2], shuffled.transitions[9]);
  ExtraTreesParams params{.n_trees = 10, .n_min = 2, .seed = 5};
  auto qa = fitted_q_iteration(batch, mdp.prices(), 4, params);
  auto qb = fitted_q_iteration(shuffled, mdp.prices(), 4, params);
  for (const Transition& t : batch.transitions) {
    CHECK(qa.value(t.z, 0) == qb.value(t.z, 0));
    CHECK(qa.value(t.z, 1) == qb.value(t.z, 1));
  }
}

TEST_CASE("empty batch rejected") {
  Batch empty;
  PriceVector p;
  p.values.fill(0.1);
  CHECK_THROWS_AS(fitted_q_iteration(empty, p, 96, {}), std::invalid_argument);
}

namespace {
// fixed Q pair for exploration tests: values come from a 1-iteration fit on
// two far-apart training points
QFunction make_q(double q_at_u0, double q_at_u1) {
  Batch batch;
  for (int rep = 0; rep < 2; ++rep) {  // distinct rows so n_min=2 splits
    Transition a;
    a.z = fv(1, 1, {0.0 + rep * 1e-6});
    a.u = 0;
    a.z_next = a.z;
    a.u_ph = 0.0;
    batch.transitions.push_back(a);
    Transition b = a;
    b.u = 1;
    batch.transitions.push_back(b);
  }
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const Transition& t : batch.transitions) {
    x.push_back({1.0, 1.0, t.z.latent[0], static_cast<double>(t.u)});
    y.push_back(t.u == 0 ? q_at_u0 : q_at_u1);
  }
  return QFunction(extra_trees_fit(x, y, {.n_trees = 10, .n_min = 2, .seed = 6}));
}
}  // namespace

TEST_CASE("greedy_action") {
  auto z = fv(1, 1, {0.0});
  CHECK(greedy_action(make_q(1.0, 2.0), z) == 0);
  CHECK(greedy_action(make_q(2.0, 1.0), z) == 1);
  CHECK(greedy_action(make_q(1.5, 1.5), z) == 0);  // tie goes to off
  CHECK(greedy_action(QFunction{}, z) == 0);       // zero Q-function ties
}

TEST_CASE("boltzmann probabilities") {
  auto z = fv(1, 1, {0.0});
  SUBCASE("equal pair is uniform") {
    auto [p0, p1] = boltzmann_probs(QFunction{}, z, 100.0);
    CHECK(p0 == doctest::Approx(0.5));
    CHECK(p1 == doctest::Approx(0.5));
  }
  SUBCASE("scaled gap of 100 at tau 100") {
    auto [p0, p1] = boltzmann_probs(make_q(0.0, 10.0), z, 100.0);
    // better action u=0: P = 1/(1+e^-1)
    CHECK(p0 == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-6));
  }
  SUBCASE("cold temperature goes greedy") {
    auto [p0, p1] = boltzmann_probs(make_q(0.0, 10.0), z, 5.0);
    CHECK(p0 >= 0.999);
  }
  SUBCASE("probabilities sum to one") {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
      auto q = make_q(rng.uniform(0, 5), rng.uniform(0, 5));
      auto [p0, p1] = boltzmann_probs(q, z, rng.uniform(1.0, 100.0));
      CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p0 > 0.0);
      CHECK(p1 > 0.0);
    }
  }
  SUBCASE("max/min ratio at tau=100 is bounded by e") {
    auto [p0, p1] = boltzmann_probs(make_q(3.0, 8.0), z, 100.0);
    CHECK(std::max(p0, p1) / std::min(p0, p1) <= std::exp(1.0) + 1e-12);
  }
  SUBCASE("greedy argmin invariant under the rescaling") {
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
      auto q = make_q(rng.uniform(0, 5), rng.uniform(0, 5));
      auto [p0, p1] = boltzmann_probs(q, z, 10.0);
      int greedy = greedy_action(q, z);
      CHECK((greedy == 0 ? p0 >= p1 : p1 >= p0));
    }
  }
}

TEST_CASE("boltzmann_sample respects probabilities") {
  auto z = fv(1, 1, {0.0});
  auto q = make_q(0.0, 10.0);
  Rng rng(79);
  int zeros = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    if (boltzmann_sample(q, z, 100.0, rng) == 0) ++zeros;
  double expect = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(static_cast<double>(zeros) / n == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("update_tau schedule") {
  ExplorationState s;
  s = update_tau(s);
  CHECK(s.tau == doctest::Approx(90.0));
  ExplorationState low{10.0, 10.0, 1.0};
  CHECK(update_tau(low).tau == doctest::Approx(1.0));

  ExplorationState run;
  int updates_to_floor = 0;
  while (run.tau > run.tau_floor) {
    run = update_tau(run);
    ++updates_to_floor;
  }
  CHECK(updates_to_floor == 10);  // ten days of exploration
}
