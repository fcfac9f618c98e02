// Compares the serial reference kernels against their OpenMP counterparts:
// same sharded streams, so the outputs must agree bit for bit while the
// wall-clock times diverge.  Exits nonzero if any pair of outputs differs.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gevregret/environment.hpp"
#include "gevregret/monte_carlo.hpp"
#include "gevregret/rng.hpp"
#include "gevregret/verify.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int failures = 0;

void report(const char* name, double serial_s, double parallel_s,
            bool identical) {
  std::printf("%-36s %10.3f s %10.3f s %8.2fx  %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s, identical ? "identical"
                                                           : "MISMATCH");
  if (!identical) ++failures;
}

template <typename F>
double timed(F&& f) {
  Clock::time_point a = Clock::now();
  f();
  return seconds(a, Clock::now());
}

}  // namespace

int main() {
  using namespace gevregret;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
  std::printf("%-36s %12s %12s %9s  %s\n", "kernel", "serial", "parallel",
              "speedup", "outputs");

  const int n = 10;
  const int64_t samples = 4000000;
  Rng rng(derive_seed(99, "bench.theta"));
  std::vector<double> theta(n);
  for (double& t : theta) t = rng.uniform(-1.0, 1.0);

  {
    SimplexEstimate a, b;
    double ts = timed([&] {
      a = mc_choice_probs(theta, 1.0, samples, 1234, Exec::kSerial);
    });
    double tp = timed([&] {
      b = mc_choice_probs(theta, 1.0, samples, 1234, Exec::kParallel);
    });
    report("perturbed-argmax frequencies", ts, tp, a.probs == b.probs);
  }

  {
    GevModel nested = zoo_nl(n);
    SimplexEstimate a, b;
    double ts = timed([&] {
      a = mc_choice_probs_nested(nested, theta, 1.0, samples, 1234,
                                 Exec::kSerial);
    });
    double tp = timed([&] {
      b = mc_choice_probs_nested(nested, theta, 1.0, samples, 1234,
                                 Exec::kParallel);
    });
    report("two-level nested frequencies", ts, tp, a.probs == b.probs);
  }

  {
    ScalarEstimate a, b;
    double ts =
        timed([&] { a = mc_surplus(theta, 1.0, samples, 77, Exec::kSerial); });
    double tp = timed(
        [&] { b = mc_surplus(theta, 1.0, samples, 77, Exec::kParallel); });
    report("smoothed-maximum sample mean", ts, tp,
           a.value == b.value && a.std_err == b.std_err);
  }

  {
    SweepConfig cfg;
    cfg.model = mnl(n);
    cfg.eta = optimal_eta(cfg.model, 2000, 1.0, BoundVariant::kThm2).eta;
    cfg.env.kind = EnvKind::kIid;
    cfg.env.n = n;
    cfg.T = 2000;
    std::vector<uint64_t> seeds;
    for (uint64_t s = 1; s <= 16; ++s) seeds.push_back(s);
    std::vector<double> a, b;
    double ts = timed([&] { a = run_sweep(cfg, seeds, Exec::kSerial); });
    double tp = timed([&] { b = run_sweep(cfg, seeds, Exec::kParallel); });
    report("16-seed regret sweep", ts, tp, a == b);
  }

  if (failures > 0) {
    std::printf("%d kernel(s) diverged between serial and parallel\n",
                failures);
    return 1;
  }
  return 0;
}
