#pragma once

#include <cstdint>
#include <vector>

#include "gevregret/gev.hpp"
#include "gevregret/rng.hpp"

namespace gevregret {

// Estimators run over fixed-size shards with per-shard derived streams and a
// shard-ordered merge, so the serial and OpenMP paths produce bit-identical
// results; Exec only selects how the shards are executed.
enum class Exec { kSerial, kParallel };

struct SimplexEstimate {
  std::vector<double> probs;
  std::vector<double> std_err;  // sqrt(p(1-p)/n) per coordinate
  int64_t n_samples = 0;
};

struct ScalarEstimate {
  double value = 0.0;
  double std_err = 0.0;
  int64_t n_samples = 0;
};

// One follow-the-perturbed-leader draw: argmax_j theta_j + eta * eps_j with
// i.i.d. standard Gumbel shocks; ties resolve to the lowest index.
int ftpl_choose(const std::vector<double>& theta, double eta, ShockSampler& s);

// Perturbed-argmax frequencies; realizes softmax(theta/eta) in expectation.
SimplexEstimate mc_choice_probs(const std::vector<double>& theta, double eta,
                                int64_t n_samples, uint64_t seed,
                                Exec exec = Exec::kParallel);

// Two-level sampler for unit-allocation partition models: pick the nest by
// perturbed inclusive values, then the member by perturbed within-nest
// scores.  Frequencies realize the model's closed-form probabilities.
int nested_gumbel_choose(const GevModel& m, const std::vector<double>& theta,
                         double eta, Rng& rng);
SimplexEstimate mc_choice_probs_nested(const GevModel& m,
                                       const std::vector<double>& theta,
                                       double eta, int64_t n_samples,
                                       uint64_t seed,
                                       Exec exec = Exec::kParallel);

// Sample mean of max_j(theta_j + eta * eps_j) under i.i.d. Gumbel shocks;
// estimates the smoothed maximum that surplus() computes in closed form.
ScalarEstimate mc_surplus(const std::vector<double>& theta, double eta,
                          int64_t n_samples, uint64_t seed,
                          Exec exec = Exec::kParallel);

}  // namespace gevregret
