#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gevregret {

// All randomness in the library flows through named streams derived from one
// master seed, so independent subsystems (environment draws, shock samplers,
// Monte Carlo shards, game initialization) never share or race a generator.
uint64_t derive_seed(uint64_t master, std::string_view stream);
uint64_t derive_seed(uint64_t master, std::string_view stream, uint64_t index);

// mt19937_64 with portable real-valued draws.  The standard pins the integer
// sequence, and we build doubles from the raw bits ourselves; the library
// distributions are implementation-defined and would break bit-for-bit
// reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // 53-bit uniform on [0, 1), clamped away from 0 so -log(-log u) is finite.
  double uniform01() {
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return u < 1e-300 ? 1e-300 : u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard Gumbel via inverse CDF.
  double gumbel() { return -std::log(-std::log(uniform01())); }

 private:
  std::mt19937_64 gen_;
};

// Additive-shock sampler used by the follow-the-perturbed-leader oracle:
// i.i.d. standard Gumbel coordinates.
struct ShockSampler {
  explicit ShockSampler(uint64_t seed) : rng(seed) {}

  Rng rng;

  void draw(std::vector<double>& eps) {
    for (double& e : eps) e = rng.gumbel();
  }
};

}  // namespace gevregret
