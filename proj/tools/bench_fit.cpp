// Compares the OpenMP ensemble fit against the serial reference on synthetic
// regression data and checks the two produce identical predictions.
#include <chrono>
#include <cstdio>
#include <vector>

#include "ewh/extra_trees.hpp"
#include "ewh/seeds.hpp"

using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 20000;
  int dim = argc > 2 ? std::atoi(argv[2]) : 8;

  ewh::Rng rng(42);
  std::vector<std::vector<double>> x(n, std::vector<double>(dim));
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) {
      x[i][j] = rng.uniform(-1.0, 1.0);
      s += x[i][j] * (j + 1);
    }
    y[i] = s + 0.1 * rng.next_gaussian();
  }

  ewh::ExtraTreesParams params;
  params.n_trees = 50;
  params.n_min = 10;
  params.seed = 7;

  auto t0 = Clock::now();
  auto serial = ewh::extra_trees_fit_serial(x, y, params);
  auto t1 = Clock::now();
  auto parallel = ewh::extra_trees_fit(x, y, params);
  auto t2 = Clock::now();

  double max_diff = 0.0;
  for (int i = 0; i < 200; ++i) {
    double d = std::abs(serial.predict(x[i]) - parallel.predict(x[i]));
    max_diff = std::max(max_diff, d);
  }

  auto ms = [](auto a, auto b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  std::printf("n=%d dim=%d trees=%d\n", n, dim, params.n_trees);
  std::printf("serial fit:   %8.1f ms\n", ms(t0, t1));
  std::printf("parallel fit: %8.1f ms\n", ms(t1, t2));
  std::printf("speedup:      %8.2fx\n", ms(t0, t1) / ms(t1, t2));
  std::printf("max |serial - parallel| prediction diff: %g\n", max_diff);
  return max_diff == 0.0 ? 0 : 1;
}
