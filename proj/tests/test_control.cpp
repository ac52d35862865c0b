#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "ewh/control.hpp"
#include "ewh/seeds.hpp"

using namespace ewh;

TEST_CASE("state_of_charge") {
  BackupConfig cfg;
  SUBCASE("bounds") {
    std::vector<double> hot(8, cfg.temp_max);
    std::vector<double> cold(8, cfg.temp_min);
    CHECK(state_of_charge(hot, cfg) == doctest::Approx(1.0));
    CHECK(state_of_charge(cold, cfg) == doctest::Approx(0.0));
  }
  SUBCASE("mixed sensors") {
    std::vector<double> s{45.0, 65.0};
    CHECK(state_of_charge(s, cfg) == doctest::Approx(0.5));
  }
  SUBCASE("clipping outside the comfort band") {
    std::vector<double> s{200.0, -50.0};
    CHECK(state_of_charge(s, cfg) == doctest::Approx(0.5));
  }
  SUBCASE("empty vector rejected") {
    std::vector<double> empty;
    CHECK_THROWS_AS(state_of_charge(empty, cfg), std::invalid_argument);
  }
  SUBCASE("monotone in every sensor") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> s(5);
      for (auto& v : s) v = rng.uniform(30.0, 80.0);
      double base = state_of_charge(s, cfg);
      for (auto& v : s) {
        double saved = v;
        v += 1.0;
        CHECK(state_of_charge(s, cfg) >= base);
        v = saved;
      }
    }
  }
}

TEST_CASE("backup controller branches") {
  BackupConfig cfg;
  CHECK(backup(0.1, 0, cfg) == doctest::Approx(2360.0));
  CHECK(backup(0.5, 1, cfg) == doctest::Approx(2360.0));
  CHECK(backup(0.5, 0, cfg) == doctest::Approx(0.0));
  CHECK(backup(1.0, 1, cfg) == doctest::Approx(0.0));
  SUBCASE("boundary inequalities are inclusive") {
    CHECK(backup(cfg.soc_lower, 0, cfg) == doctest::Approx(2360.0));
    CHECK(backup(cfg.soc_upper, 1, cfg) == doctest::Approx(0.0));
  }
}

TEST_CASE("backup safety and monotonicity properties") {
  BackupConfig cfg;
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    double soc = rng.next_double();
    CHECK(backup(soc, 1, cfg) >= backup(soc, 0, cfg));
    if (soc <= cfg.soc_lower) {
      CHECK(backup(soc, 0, cfg) == cfg.heater_power);
      CHECK(backup(soc, 1, cfg) == cfg.heater_power);
    }
    if (soc >= cfg.soc_upper) {
      CHECK(backup(soc, 0, cfg) == 0.0);
      CHECK(backup(soc, 1, cfg) == 0.0);
    }
  }
}

TEST_CASE("thermostat hysteresis") {
  BackupConfig cfg;
  CHECK(thermostat(false, 0.15, cfg) == true);
  CHECK(thermostat(true, 0.99, cfg) == true);
  CHECK(thermostat(false, 0.5, cfg) == false);
  CHECK(thermostat(true, 1.0, cfg) == false);
}

TEST_CASE("config validation") {
  BackupConfig cfg;
  cfg.soc_lower = 0.9;
  cfg.soc_upper = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BackupConfig{};
  cfg.temp_min = 70.0;
  cfg.temp_max = 60.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
