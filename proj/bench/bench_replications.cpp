// Serial vs OpenMP replication timing for the two hot paths.
//   bench_replications [reps]

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "cfmac/kernels.hpp"
#include "cfmac/scenarios.hpp"

using namespace cfmac;

namespace {

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 200;
  std::cout << "threads " << omp_get_max_threads() << ", reps " << reps << '\n';

  ProtocolParams params;
  params.beta = 0.95;
  const auto phy = SimConfig::experiment_phy();
  auto kernel = [&](std::uint64_t s, int) {
    return schedule_convergence(ProtocolKind::Lmac, 16, 16, params, s, 1'000'000, phy).schedules;
  };
  std::vector<std::int64_t> a, b;
  const double ks = seconds([&] { a = replicate_serial(reps, 1, kernel); });
  const double kp = seconds([&] { b = replicate(reps, 1, kernel); });
  std::cout << "kernel lmac N=C=16: serial " << ks << " s, parallel " << kp << " s, identical " << (a == b) << '\n';

  SimConfig c;
  c.horizon = 2.0;
  auto run = [&](std::uint64_t s, int) { return simulate(c, 16, 0, s).thr_norm; };
  std::vector<double> x, y;
  const double es = seconds([&] { x = replicate_serial(reps / 10 + 1, 1, run); });
  const double ep = seconds([&] { y = replicate(reps / 10 + 1, 1, run); });
  std::cout << "engine lmac 2 s horizon: serial " << es << " s, parallel " << ep << " s, identical " << (x == y)
            << '\n';
  return a == b && x == y ? 0 : 1;
}
